//! Assembly of `Sha(L/k)` for Kummer families from the lattice of
//! intersections:
//!
//! ```text
//! Sha(L/k) ≅ ⊕_{r ∈ R∖{0}} Z/p^{Δ_r − r}
//!          ⊕ ⊕_{r ∈ R} ⊕_{l ≥ L(U_r)} ⊕_{c ∈ U_r/∼_l} (Z/p^{f_c − r})^{n_{l+1}(c) − 1}
//! ```
//!
//! The patching degrees `Δ_r` and degrees of freedom `f_c` come from an
//! [`InvariantProvider`]. The assembler itself only checks the provider's
//! contract (`r ≤ Δ_r ≤ n`, and `r ≤ f_c ≤ n` on every contributing class).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::abelian::{direct_sum, FiniteAbelianGroup};
use crate::kummer::{self, EquivalenceStructure, KummerError, KummerFamily, NormalizedFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeeError {
    #[error(transparent)]
    Kummer(#[from] KummerError),
    #[error("provider contract violated: {0}")]
    ProviderContractViolation(String),
    #[error("no override for {0} and no fallback provider")]
    MissingOverride(String),
    #[error("prime {0} appears twice")]
    DuplicatePrime(u64),
    #[error("family keyed by {key} is defined over p = {actual}")]
    PrimeMismatch { key: u64, actual: u64 },
    #[error("layer l = {l} above n still has a non-singleton class")]
    TruncationViolated { l: u32 },
}

/// What a provider sees: the normalized family and its structure.
#[derive(Clone, Copy, Debug)]
pub struct ProviderContext<'a> {
    pub family: &'a KummerFamily,
    pub structure: &'a EquivalenceStructure,
}

/// Source of the integer invariants `Δ_r` and `f_c`.
pub trait InvariantProvider {
    /// Name and version, echoed into every result.
    fn name(&self) -> String;

    /// `Δ_r` for `r ∈ R∖{0}`.
    fn patching_degree(&self, ctx: ProviderContext<'_>, r: u32) -> Result<u32, LeeError>;

    /// `f_c` for the class `c` (sorted indices) of `U_r` at threshold `l`.
    fn degree_of_freedom(&self, ctx: ProviderContext<'_>, r: u32, l: u32, class: &[usize]) -> Result<u32, LeeError>;
}

/// Built-in provider, `fitted-2`.
///
/// Its rule is combinatorial. It was calibrated only on the two worked
/// bicyclic families over `Q(ζ_27)` (with `ℓ1 = 5`, `ℓ2 = 19`) and on the
/// families where every provider gives the same answer. A term sitting at
/// depth `t` gets exponent 1 when `t + margin ≤ n` and exponent 0 otherwise:
///
/// * `Δ_r = r + 1` if `r + margin ≤ n`, else `Δ_r = r`;
/// * `f_c = r + 1` for a class at threshold `l` if `l + margin ≤ n`, else `f_c = r`.
///
/// With the default `margin = 2` both calibration families give the same
/// group for every ordering of their fields. The rule does not come from local
/// conditions. Replace it with an [`OverrideProvider`] whenever the true
/// invariants are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceProvider {
    pub margin: u32,
}

impl ReferenceProvider {
    pub const VERSION: &'static str = "fitted-2";
}

impl Default for ReferenceProvider {
    fn default() -> Self {
        Self { margin: 2 }
    }
}

impl InvariantProvider for ReferenceProvider {
    fn name(&self) -> String {
        format!("reference/{} (margin = {})", Self::VERSION, self.margin)
    }

    fn patching_degree(&self, ctx: ProviderContext<'_>, r: u32) -> Result<u32, LeeError> {
        let n = ctx.structure.n;
        Ok(if r + self.margin <= n { r + 1 } else { r })
    }

    fn degree_of_freedom(&self, ctx: ProviderContext<'_>, r: u32, l: u32, _class: &[usize]) -> Result<u32, LeeError> {
        let n = ctx.structure.n;
        Ok(if l + self.margin <= n { r + 1 } else { r })
    }
}

/// Explicit values, keyed by `r` for `Δ_r` and by `(r, l, smallest index of
/// the class)` for `f_c`, in the indexing of the normalized family. Missing
/// keys fall back to `base` when one is set.
#[derive(Default)]
pub struct OverrideProvider {
    pub patching: BTreeMap<u32, u32>,
    pub freedom: BTreeMap<(u32, u32, usize), u32>,
    pub base: Option<Box<dyn InvariantProvider + Send + Sync>>,
}

impl OverrideProvider {
    pub fn with_base(base: impl InvariantProvider + Send + Sync + 'static) -> Self {
        Self { base: Some(Box::new(base)), ..Self::default() }
    }
}

impl InvariantProvider for OverrideProvider {
    fn name(&self) -> String {
        let base = self.base.as_ref().map_or_else(|| "none".to_string(), |b| b.name());
        format!("overrides ({} patching, {} freedom; fallback {base})", self.patching.len(), self.freedom.len())
    }

    fn patching_degree(&self, ctx: ProviderContext<'_>, r: u32) -> Result<u32, LeeError> {
        match (self.patching.get(&r), &self.base) {
            (Some(&d), _) => Ok(d),
            (None, Some(b)) => b.patching_degree(ctx, r),
            (None, None) => Err(LeeError::MissingOverride(format!("Δ_{r}"))),
        }
    }

    fn degree_of_freedom(&self, ctx: ProviderContext<'_>, r: u32, l: u32, class: &[usize]) -> Result<u32, LeeError> {
        let key = (r, l, class[0]);
        match (self.freedom.get(&key), &self.base) {
            (Some(&f), _) => Ok(f),
            (None, Some(b)) => b.degree_of_freedom(ctx, r, l, class),
            (None, None) => Err(LeeError::MissingOverride(format!("f_c for (r={r}, l={l}, class {})", class[0]))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SummandOrigin {
    Patching { r: u32 },
    Class { r: u32, l: u32, representative: usize, size: usize },
}

/// `(Z/p^exponent)^multiplicity`, tagged with the term that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub origin: SummandOrigin,
    pub exponent: u32,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShaResult {
    pub p: u64,
    pub group: FiniteAbelianGroup,
    pub summand_trace: Vec<Summand>,
    pub provider: String,
    pub normalized: NormalizedFamily,
}

impl ShaResult {
    /// Direct sum of the traced summands; equals `group` by construction.
    pub fn trace_group(&self) -> FiniteAbelianGroup {
        trace_sum(self.p, &self.summand_trace)
    }
}

fn trace_sum(p: u64, trace: &[Summand]) -> FiniteAbelianGroup {
    let p = BigUint::from(p);
    let orders: Vec<BigUint> =
        trace.iter().flat_map(|s| std::iter::repeat_n(p.pow(s.exponent), s.multiplicity)).collect();
    FiniteAbelianGroup::from_cyclic_orders(orders).expect("prime powers are positive")
}

/// Validates and normalizes `f`, then evaluates the formula with `prov`.
pub fn assemble_sha(f: &KummerFamily, prov: &dyn InvariantProvider) -> Result<ShaResult, LeeError> {
    let normalized = kummer::validate_and_normalize(f)?;
    let family = &normalized.family;
    let st = kummer::equivalence_structure(family)?;
    let ctx = ProviderContext { family, structure: &st };
    let n = family.n;
    let mut trace = Vec::new();

    for &r in st.r_set.iter().filter(|&&r| r != 0) {
        let delta = prov.patching_degree(ctx, r)?;
        if delta < r || delta > n {
            return Err(LeeError::ProviderContractViolation(format!("Δ_{r} = {delta} outside [{r}, {n}]")));
        }
        if delta > r {
            trace.push(Summand { origin: SummandOrigin::Patching { r }, exponent: delta - r, multiplicity: 1 });
        }
    }

    for &r in &st.r_set {
        for layer in &st.layers[&r] {
            for c in &layer.classes {
                let multiplicity = c.refinement_count - 1;
                if multiplicity == 0 {
                    continue;
                }
                let f_c = prov.degree_of_freedom(ctx, r, layer.l, &c.members)?;
                if f_c < r || f_c > n {
                    return Err(LeeError::ProviderContractViolation(format!(
                        "f_c = {f_c} outside [{r}, {n}] for class {:?} at (r={r}, l={})",
                        c.members, layer.l
                    )));
                }
                if f_c > r {
                    trace.push(Summand {
                        origin: SummandOrigin::Class {
                            r,
                            l: layer.l,
                            representative: c.representative(),
                            size: c.members.len(),
                        },
                        exponent: f_c - r,
                        multiplicity,
                    });
                }
            }
        }
    }

    check_truncation(&st)?;
    trace.sort_by(|a, b| a.origin.cmp(&b.origin));
    let group = trace_sum(family.p, &trace);
    Ok(ShaResult { p: family.p, group, summand_trace: trace, provider: prov.name(), normalized })
}

/// Every `e_{i,j}` with `i ≠ j` is at most `n`, so above `n` each `U_r`
/// splits into singletons and the remaining layers are empty.
fn check_truncation(st: &EquivalenceStructure) -> Result<(), LeeError> {
    for &r in &st.r_set {
        let u = st.u(r);
        for l in st.n + 1..=2 * st.n {
            if st.classes_at(u, l).iter().any(|c| c.len() > 1) {
                return Err(LeeError::TruncationViolated { l });
            }
        }
    }
    Ok(())
}

/// Human-readable listing of the summands and where each one came from.
pub fn sha_with_trace_report(res: &ShaResult) -> String {
    let mut out = String::new();
    if res.group.is_trivial() {
        out.push_str("Sha = 0 (HNP holds)\n");
    } else {
        let _ = writeln!(out, "Sha = {}", res.group);
    }
    let _ = writeln!(out, "provider: {}", res.provider);
    let perm = &res.normalized.permutation;
    for s in &res.summand_trace {
        let piece = if s.multiplicity == 1 {
            format!("Z/{}", BigUint::from(res.p).pow(s.exponent))
        } else {
            format!("(Z/{})^{}", BigUint::from(res.p).pow(s.exponent), s.multiplicity)
        };
        match &s.origin {
            SummandOrigin::Patching { r } => {
                let _ = writeln!(out, "  {piece}  from patching term r={r} (Δ_{r} − {r} = {})", s.exponent);
            }
            SummandOrigin::Class { r, l, representative, size } => {
                let _ = writeln!(
                    out,
                    "  {piece}  from class term r={r} l={l} class of {size} led by field {representative} (input #{}): \
                     f_c − r = {}, n_(l+1)(c) − 1 = {}",
                    perm[*representative], s.exponent, s.multiplicity
                );
            }
        }
    }
    let ok = res.trace_group() == res.group;
    let _ =
        writeln!(out, "trace check: summands sum to {} ({})", res.trace_group(), if ok { "ok" } else { "MISMATCH" });
    out
}

/// `Sha(L/k)` as the direct sum of its p-primary parts, one Kummer family
/// per prime.
pub fn multi_prime_sha(
    families: &[(u64, KummerFamily)],
    prov: &dyn InvariantProvider,
) -> Result<FiniteAbelianGroup, LeeError> {
    let mut seen = BTreeSet::new();
    let mut parts = Vec::with_capacity(families.len());
    for (key, fam) in families {
        if !seen.insert(*key) {
            return Err(LeeError::DuplicatePrime(*key));
        }
        if fam.p != *key {
            return Err(LeeError::PrimeMismatch { key: *key, actual: fam.p });
        }
        parts.push(assemble_sha(fam, prov)?.group);
    }
    Ok(direct_sum(&parts))
}

/// Order of the `Z/p^e` summand, for reports.
pub fn summand_order(p: u64, exponent: u32) -> BigUint {
    if exponent == 0 {
        BigUint::one()
    } else {
        BigUint::from(p).pow(exponent)
    }
}
