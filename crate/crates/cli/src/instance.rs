//! Instance files: one TOML document per problem.
//!
//! ```toml
//! format_version = 1
//! mode = "sha"
//!
//! [family]
//! p = 3
//! n = 3
//! primes = [5, 19]
//! vectors = [[1, 0], [1, 1], [2, 3], [3, 5], [5, 11]]
//! ```
//!
//! Which top-level blocks are allowed depends on `mode`:
//!
//! | mode           | required              | optional             |
//! |----------------|-----------------------|----------------------|
//! | `sha`          | `family`              | `provider_overrides` |
//! | `hnp`          | `hnp` or `family`     |                      |
//! | `class-number` | `context`             | `places`             |
//! | `local-index`  | `places`              |                      |
//! | `pell`         | `pell`                |                      |
//! | `unit-index`   | `units`               |                      |
//! | `validate`     | `family`              |                      |
//!
//! Unknown keys anywhere are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use multinorm::abelian::{FiniteAbelianGroup, SubgroupGens};
use multinorm::hnp::{
    ClosureGroup, FieldProfile, IntersectionProfile, MultiFieldFacts, PrimeFamilyFacts, SplitKind, SplitWitness,
};
use multinorm::kummer::{KummerError, KummerFamily};
use multinorm::localnorm::{FiniteLocalData, LocalPlaceData, PlaceKind};
use multinorm::ono::{ClassNumberContext, DegreeZeroData, IdealFormContext, NarrowData};
use multinorm::units::{FreePartData, UnitIndexInput};
use multinorm::{OverrideProvider, ReferenceProvider};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Sha,
    Hnp,
    ClassNumber,
    LocalIndex,
    Pell,
    UnitIndex,
    Validate,
}

impl Mode {
    pub const ALL: [Mode; 7] =
        [Mode::Sha, Mode::Hnp, Mode::ClassNumber, Mode::LocalIndex, Mode::Pell, Mode::UnitIndex, Mode::Validate];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sha => "sha",
            Mode::Hnp => "hnp",
            Mode::ClassNumber => "class-number",
            Mode::LocalIndex => "local-index",
            Mode::Pell => "pell",
            Mode::UnitIndex => "unit-index",
            Mode::Validate => "validate",
        }
    }

    /// `(required, optional)` block names. A required entry `"a|b"` means
    /// exactly one of the two.
    fn blocks(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Mode::Sha => (&["family"], &["provider_overrides"]),
            Mode::Hnp => (&["hnp|family"], &[]),
            Mode::ClassNumber => (&["context"], &["places"]),
            Mode::LocalIndex => (&["places"], &[]),
            Mode::Pell => (&["pell"], &[]),
            Mode::UnitIndex => (&["units"], &[]),
            Mode::Validate => (&["family"], &[]),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider_overrides: Option<OverridesBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub places: Option<Vec<PlaceBlock>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hnp: Option<HnpBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pell: Option<PellBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitsBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyBlock {
    pub p: u64,
    pub n: u32,
    /// The rational primes `ℓ1, ℓ2`.
    pub primes: Vec<u64>,
    /// Exponent pairs `(a_i, b_i)`, each entry in `[0, p^n)`.
    pub vectors: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_exponents: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independence_acknowledged: Option<bool>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fallback {
    #[default]
    Reference,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverridesBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<Fallback>,
    /// Margin of the reference fallback.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub patching: Vec<PatchingEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub freedom: Vec<FreedomEntry>,
}

/// `Δ_r = delta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchingEntry {
    pub r: u32,
    pub delta: u32,
}

/// `f_c = f` for the class of `U_r` at threshold `l` whose representative
/// (smallest member after normalization) is input field `field`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreedomEntry {
    pub r: u32,
    pub l: u32,
    pub field: usize,
    pub f: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaceKindTag {
    Finite,
    Real,
    Complex,
}

/// One place `v` of `k`. Groups are given by cyclic orders, subgroups by
/// generator lists in those coordinates, one list per `w | v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceBlock {
    pub id: String,
    pub kind: PlaceKindTag,
    #[serde(default)]
    pub in_s: bool,
    #[serde(default)]
    pub ramified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia_group: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_degrees: Option<Vec<u32>>,
}

/// An integer or a string `"a/b"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatInput {
    Int(i64),
    Text(String),
}

impl RatInput {
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            RatInput::Int(i) => Some(BigRational::from_integer(BigInt::from(*i))),
            RatInput::Text(s) => {
                let s = s.trim();
                match s.split_once('/') {
                    Some((a, b)) => {
                        let a = BigInt::from_str(a.trim()).ok()?;
                        let b = BigInt::from_str(b.trim()).ok()?;
                        (!b.is_zero()).then(|| BigRational::new(a, b))
                    }
                    None => BigInt::from_str(s).ok().map(BigRational::from_integer),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextBlock {
    pub hs_l: u64,
    pub hs_k: u64,
    pub sha_order: u64,
    pub lab_index: u64,
    pub unit_index: u64,
    pub adelic_unit_index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub narrow: Option<NarrowBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_zero: Option<DegreeZeroBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<IdealBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cm: Option<CmBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NarrowBlock {
    pub hs_plus_l: u64,
    pub hs_plus_k: u64,
    pub q_phi: RatInput,
    pub unit_index_plus: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeZeroBlock {
    pub h0_l: u64,
    pub h0_k: u64,
    pub q_phi0: RatInput,
    pub uk_index: u64,
    pub residue_norm_index: u64,
    /// Residue data to cross-check `residue_norm_index` against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue: Option<ResidueBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidueBlock {
    pub q: u64,
    pub sizes: Vec<u64>,
    pub degrees: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealBlock {
    pub i1_over_p1: u64,
    pub unit_meet_index: u64,
    pub adelic_meet_index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmBlock {
    pub h_k: u64,
    pub h_k_plus: u64,
    pub q_unit_index: u64,
    pub t: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HnpBlock {
    pub fields: Vec<FieldBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairwise_closure_disjoint: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<IntersectionBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime_family: Option<PrimeFamilyBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub degree: u64,
    pub galois: bool,
    pub abelian: bool,
    pub cyclic: bool,
    /// `cyclic`, `dihedral`, `symmetric`, `alternating` or `other:<label>`.
    pub closure: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha3_trivial: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha_trivial: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha_omega_trivial: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKindTag {
    Intersection,
    Base,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitBlock {
    pub index: usize,
    pub kind: SplitKindTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeFamilyBlock {
    pub p: u64,
    pub fields_distinct: bool,
    pub compositum_degree_exceeds_p2: bool,
    pub some_local_degree_exceeds_p: bool,
    pub some_factor_cyclic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PellBlock {
    pub d: u64,
}

/// Either `fields` (over `Q`, `S = {∞}`) or the general data
/// `torsion_index`, `degrees`, `free_rank`, `norm_images`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<UnitFieldBlock>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_images: Option<Vec<Vec<i64>>>,
}

/// `K_i` over `Q`: its degree and, if known, whether `-1` is a unit norm.
/// `pell_d` asks for the sign of the fundamental unit of `Q(√pell_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitFieldBlock {
    pub degree: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pell_d: Option<u64>,
}

/// Syntax check, schema check, then block-level semantic checks.
pub fn parse_instance(text: &str) -> Result<InstanceFile, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::Syntax { line: 1, column: 1, message: "empty instance file".into() });
    }
    if let Err(e) = toml::from_str::<toml::Table>(text) {
        return Err(located(text, &e, "syntax error"));
    }
    let inst: InstanceFile = toml::from_str(text).map_err(|e| located(text, &e, "schema error"))?;
    inst.check()?;
    Ok(inst)
}

fn located(text: &str, e: &toml::de::Error, what: &str) -> CliError {
    let offset = e.span().map_or(0, |s| s.start).min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    CliError::Syntax { line, column, message: format!("{what}: {}", e.message().trim()) }
}

fn semantic(key: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Semantic { key: key.into(), message: message.into() }
}

impl InstanceFile {
    fn present(&self) -> BTreeMap<&'static str, bool> {
        BTreeMap::from([
            ("family", self.family.is_some()),
            ("provider_overrides", self.provider_overrides.is_some()),
            ("places", self.places.is_some()),
            ("context", self.context.is_some()),
            ("hnp", self.hnp.is_some()),
            ("pell", self.pell.is_some()),
            ("units", self.units.is_some()),
        ])
    }

    /// Semantic checks that need no computation beyond the block itself.
    pub fn check(&self) -> Result<(), CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(semantic(
                "format_version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.format_version),
            ));
        }
        let present = self.present();
        let (required, optional) = self.mode.blocks();
        let mut allowed = Vec::new();
        for req in required {
            let alts: Vec<&str> = req.split('|').collect();
            let have: Vec<&str> = alts.iter().copied().filter(|a| present[a]).collect();
            match have.len() {
                0 => return Err(semantic(alts[0], format!("block required by mode {}", self.mode))),
                1 => {}
                _ => {
                    return Err(semantic(have[1], format!("mode {} takes only one of {}", self.mode, alts.join(", "))))
                }
            }
            allowed.extend(alts);
        }
        allowed.extend(optional.iter().copied());
        if let Some((name, _)) = present.iter().find(|(name, &p)| p && !allowed.contains(name)) {
            return Err(semantic(*name, format!("block not allowed in mode {}", self.mode)));
        }

        if let Some(f) = &self.family {
            f.build()?;
        }
        if let Some(o) = &self.provider_overrides {
            o.check()?;
        }
        if let Some(places) = &self.places {
            if places.is_empty() {
                return Err(semantic("places", "empty place list"));
            }
            for (i, p) in places.iter().enumerate() {
                p.build(i)?;
            }
        }
        if let Some(c) = &self.context {
            c.build()?;
        }
        if let Some(h) = &self.hnp {
            h.build()?;
        }
        if let Some(p) = &self.pell {
            let s = (p.d as f64).sqrt() as u64;
            let square = (s.saturating_sub(1)..=s + 1).any(|r| r.checked_mul(r) == Some(p.d));
            if p.d < 2 || square {
                return Err(semantic("pell.d", format!("d = {} must be a non-square integer >= 2", p.d)));
            }
        }
        if let Some(u) = &self.units {
            u.check()?;
        }
        Ok(())
    }

    /// TOML text that parses back to `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("instance serializes")
    }
}

impl FamilyBlock {
    pub fn build(&self) -> Result<KummerFamily, CliError> {
        if self.primes.len() != 2 {
            return Err(semantic("family.primes", format!("expected two primes, got {}", self.primes.len())));
        }
        let mut vectors = Vec::with_capacity(self.vectors.len());
        let mut family = KummerFamily::new(self.p, self.n, (self.primes[0], self.primes[1]), Vec::new());
        // Range errors need p^n; the structural check reports bad p, n first.
        let q = match family.check_structure() {
            Err(KummerError::EmptyFamily) => family.modulus(),
            Err(e) => return Err(kummer_semantic(e)),
            Ok(()) => unreachable!("a family without vectors never passes"),
        };
        if self.vectors.is_empty() {
            return Err(semantic("family.vectors", "family has no fields"));
        }
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != 2 {
                return Err(semantic(
                    format!("family.vectors[{i}]"),
                    format!("expected a pair, got {} entries", v.len()),
                ));
            }
            for (j, &x) in v.iter().enumerate() {
                if x < 0 || x as u64 >= q {
                    let name = if j == 0 { "a" } else { "b" };
                    return Err(semantic(
                        format!("family.vectors[{i}][{j}]"),
                        format!("{name}_{i} = {x} is outside [0, {q}); reduce it modulo p^n"),
                    ));
                }
            }
            vectors.push([v[0] as u64, v[1] as u64]);
        }
        family.vectors = vectors;
        if let Some(b) = &self.base {
            family.base_label = b.clone();
        }
        family.declared_exponents = self.declared_exponents.clone();
        family.independence_acknowledged = self.independence_acknowledged.unwrap_or(false);
        family.check_structure().map_err(kummer_semantic)?;
        Ok(family)
    }
}

/// The instance key a Kummer error refers to.
pub fn kummer_key(e: &KummerError) -> String {
    match e {
        KummerError::NotPrime(_) => "family.p".into(),
        KummerError::InvalidLevel | KummerError::ModulusTooLarge { .. } => "family.n".into(),
        KummerError::InvalidPrimePair(..) => "family.primes".into(),
        KummerError::EmptyFamily => "family.vectors".into(),
        KummerError::ExponentOutOfRange { index, .. } | KummerError::ZeroVector(index) => {
            format!("family.vectors[{index}]")
        }
        KummerError::DuplicateField(_, j) => format!("family.vectors[{j}]"),
        KummerError::CommonIntersectionNotTrivial(_) => "family.vectors".into(),
        KummerError::DegreeMismatch { index, .. } => format!("family.declared_exponents[{index}]"),
        KummerError::DeclaredLengthMismatch { .. } => "family.declared_exponents".into(),
        KummerError::IndexOutOfRange { .. } => "family".into(),
    }
}

fn kummer_semantic(e: KummerError) -> CliError {
    semantic(kummer_key(&e), e.to_string())
}

impl OverridesBlock {
    fn check(&self) -> Result<(), CliError> {
        if self.margin.is_some() && self.fallback == Some(Fallback::None) {
            return Err(semantic("provider_overrides.margin", "margin needs the reference fallback"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, e) in self.patching.iter().enumerate() {
            if !seen.insert(e.r) {
                return Err(semantic(format!("provider_overrides.patching[{i}]"), format!("Δ_{} given twice", e.r)));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, e) in self.freedom.iter().enumerate() {
            if !seen.insert((e.r, e.l, e.field)) {
                return Err(semantic(
                    format!("provider_overrides.freedom[{i}]"),
                    format!("f_c for (r={}, l={}, field {}) given twice", e.r, e.l, e.field),
                ));
            }
        }
        Ok(())
    }

    /// The provider, with `field` keys translated through `inverse`, which
    /// maps input indices to normalized ones.
    pub fn provider(&self, inverse: &[usize]) -> Result<OverrideProvider, CliError> {
        let mut prov = match self.fallback.unwrap_or_default() {
            Fallback::Reference => {
                let mut base = ReferenceProvider::default();
                if let Some(m) = self.margin {
                    base.margin = m;
                }
                OverrideProvider::with_base(base)
            }
            Fallback::None => OverrideProvider::default(),
        };
        for e in &self.patching {
            prov.patching.insert(e.r, e.delta);
        }
        for (i, e) in self.freedom.iter().enumerate() {
            let &norm = inverse.get(e.field).ok_or_else(|| {
                semantic(
                    format!("provider_overrides.freedom[{i}].field"),
                    format!("no input field {} (family has {})", e.field, inverse.len()),
                )
            })?;
            prov.freedom.insert((e.r, e.l, norm), e.f);
        }
        Ok(prov)
    }
}

fn group_from_orders(key: &str, orders: &[u64]) -> Result<FiniteAbelianGroup, CliError> {
    if let Some(pos) = orders.iter().position(|&o| o == 0) {
        return Err(semantic(format!("{key}[{pos}]"), "cyclic orders must be positive"));
    }
    FiniteAbelianGroup::from_cyclic_orders(orders.iter().map(|&o| BigUint::from(o)))
        .map_err(|e| semantic(key, e.to_string()))
}

fn subgroups(
    key: &str,
    ambient: &FiniteAbelianGroup,
    orders: &[u64],
    lists: &[Vec<Vec<i64>>],
) -> Result<Vec<SubgroupGens>, CliError> {
    let rank = orders.len();
    lists
        .iter()
        .enumerate()
        .map(|(w, gens)| {
            if let Some(g) = gens.iter().position(|g| g.len() != rank) {
                return Err(semantic(
                    format!("{key}[{w}][{g}]"),
                    format!("generator has {} coordinates, the group has {rank}", gens[g].len()),
                ));
            }
            let big: Vec<Vec<BigInt>> = gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect();
            coords_to_ambient(ambient, orders, big).map_err(|m| semantic(format!("{key}[{w}]"), m))
        })
        .collect()
}

/// Generators are given in the coordinates of the cyclic orders as written;
/// the ambient group is stored by invariant factors, so the orders must
/// already form a divisibility chain unless no generator is nonzero.
fn coords_to_ambient(
    ambient: &FiniteAbelianGroup,
    orders: &[u64],
    gens: Vec<Vec<BigInt>>,
) -> Result<SubgroupGens, String> {
    let chain: Vec<BigUint> = orders.iter().map(|&o| BigUint::from(o)).collect();
    if ambient.invariant_factors() == chain.as_slice() {
        return SubgroupGens::new(ambient.clone(), gens).map_err(|e| e.to_string());
    }
    if gens.iter().all(|g| g.iter().all(|x| x.is_zero())) {
        return Ok(SubgroupGens::trivial(ambient.clone()));
    }
    Err("list the group orders as an invariant-factor chain (each dividing the next, no 1s) to give generators".into())
}

impl PlaceBlock {
    pub fn build(&self, index: usize) -> Result<LocalPlaceData, CliError> {
        let key = |f: &str| format!("places[{index}].{f}");
        let forbid = |name: &str, set: bool| -> Result<(), CliError> {
            if set {
                Err(semantic(key(name), format!("not allowed for a {} place", self.kind_str())))
            } else {
                Ok(())
            }
        };
        let req = |name: &str| semantic(key(name), format!("required for a {} place", self.kind_str()));
        let kind = match self.kind {
            PlaceKindTag::Finite => {
                forbid("local_degrees", self.local_degrees.is_some())?;
                let orders = self.group.as_ref().ok_or_else(|| req("group"))?;
                let decomposition = self.decomposition.as_ref().ok_or_else(|| req("decomposition"))?;
                let i_orders = self.inertia_group.as_ref().ok_or_else(|| req("inertia_group"))?;
                let inertia = self.inertia.as_ref().ok_or_else(|| req("inertia"))?;
                let g = group_from_orders(&key("group"), orders)?;
                let i = group_from_orders(&key("inertia_group"), i_orders)?;
                PlaceKind::Finite(FiniteLocalData {
                    decomposition: subgroups(&key("decomposition"), &g, orders, decomposition)?,
                    full_group: g,
                    inertia: subgroups(&key("inertia"), &i, i_orders, inertia)?,
                    inertia_group: i,
                })
            }
            PlaceKindTag::Real | PlaceKindTag::Complex => {
                for (name, set) in [
                    ("group", self.group.is_some()),
                    ("decomposition", self.decomposition.is_some()),
                    ("inertia_group", self.inertia_group.is_some()),
                    ("inertia", self.inertia.is_some()),
                ] {
                    forbid(name, set)?;
                }
                if self.ramified {
                    return Err(semantic(key("ramified"), "archimedean places cannot be ramified"));
                }
                if self.kind == PlaceKindTag::Real {
                    let local_degrees = self.local_degrees.clone().ok_or_else(|| req("local_degrees"))?;
                    PlaceKind::Real { local_degrees }
                } else {
                    forbid("local_degrees", self.local_degrees.is_some())?;
                    PlaceKind::Complex
                }
            }
        };
        Ok(LocalPlaceData { place_id: self.id.clone(), kind, in_s: self.in_s, ramified: self.ramified })
    }

    fn kind_str(&self) -> &'static str {
        match self.kind {
            PlaceKindTag::Finite => "finite",
            PlaceKindTag::Real => "real",
            PlaceKindTag::Complex => "complex",
        }
    }
}

fn positive(key: &str, v: u64) -> Result<BigUint, CliError> {
    if v == 0 {
        Err(semantic(key, "must be positive"))
    } else {
        Ok(BigUint::from(v))
    }
}

fn positive_rational(key: &str, v: &RatInput) -> Result<BigRational, CliError> {
    match v.to_rational() {
        Some(q) if q.is_positive() => Ok(q),
        Some(_) => Err(semantic(key, "must be positive")),
        None => Err(semantic(key, "expected an integer or a fraction \"a/b\"")),
    }
}

impl ContextBlock {
    pub fn build(&self) -> Result<ClassNumberContext, CliError> {
        let narrow = match &self.narrow {
            Some(n) => Some(NarrowData {
                hs_plus_l: positive("context.narrow.hs_plus_l", n.hs_plus_l)?,
                hs_plus_k: positive("context.narrow.hs_plus_k", n.hs_plus_k)?,
                q_phi: positive_rational("context.narrow.q_phi", &n.q_phi)?,
                unit_index_plus: positive("context.narrow.unit_index_plus", n.unit_index_plus)?,
            }),
            None => None,
        };
        let degree_zero = match &self.degree_zero {
            Some(z) => Some(DegreeZeroData {
                h0_l: positive("context.degree_zero.h0_l", z.h0_l)?,
                h0_k: positive("context.degree_zero.h0_k", z.h0_k)?,
                q_phi0: positive_rational("context.degree_zero.q_phi0", &z.q_phi0)?,
                uk_index: positive("context.degree_zero.uk_index", z.uk_index)?,
                residue_norm_index: positive("context.degree_zero.residue_norm_index", z.residue_norm_index)?,
            }),
            None => None,
        };
        if let Some(i) = &self.ideal {
            self.ideal_context(i)?;
        }
        if let Some(c) = &self.cm {
            positive("context.cm.h_k", c.h_k)?;
            positive("context.cm.h_k_plus", c.h_k_plus)?;
            positive("context.cm.q_unit_index", c.q_unit_index)?;
        }
        Ok(ClassNumberContext {
            hs_l: positive("context.hs_l", self.hs_l)?,
            hs_k: positive("context.hs_k", self.hs_k)?,
            sha_order: positive("context.sha_order", self.sha_order)?,
            lab_index: positive("context.lab_index", self.lab_index)?,
            unit_index: positive("context.unit_index", self.unit_index)?,
            adelic_unit_index: positive("context.adelic_unit_index", self.adelic_unit_index)?,
            narrow,
            degree_zero,
        })
    }

    pub fn ideal_context(&self, i: &IdealBlock) -> Result<IdealFormContext, CliError> {
        Ok(IdealFormContext {
            i1_over_p1: positive("context.ideal.i1_over_p1", i.i1_over_p1)?,
            unit_meet_index: positive("context.ideal.unit_meet_index", i.unit_meet_index)?,
            adelic_meet_index: positive("context.ideal.adelic_meet_index", i.adelic_meet_index)?,
        })
    }
}

fn closure_from_str(key: &str, s: &str) -> Result<ClosureGroup, CliError> {
    Ok(match s {
        "cyclic" => ClosureGroup::Cyclic,
        "dihedral" => ClosureGroup::Dihedral,
        "symmetric" => ClosureGroup::Symmetric,
        "alternating" => ClosureGroup::Alternating,
        other => match other.strip_prefix("other:") {
            Some(label) if !label.trim().is_empty() => ClosureGroup::Other(label.trim().to_string()),
            _ => {
                return Err(semantic(
                    key,
                    format!(
                    "unknown closure group {other:?}; use cyclic, dihedral, symmetric, alternating or other:<label>"
                ),
                ))
            }
        },
    })
}

impl HnpBlock {
    pub fn build(&self) -> Result<(Vec<FieldProfile>, MultiFieldFacts), CliError> {
        if self.fields.is_empty() {
            return Err(semantic("hnp.fields", "no fields"));
        }
        let profiles = self
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                Ok(FieldProfile {
                    degree: f.degree,
                    is_galois: f.galois,
                    is_abelian: f.abelian,
                    is_cyclic: f.cyclic,
                    closure_group: closure_from_str(&format!("hnp.fields[{i}].closure"), &f.closure)?,
                    sha3_trivial: f.sha3_trivial,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        if let Some(s) = &self.split {
            if s.index == 0 || s.index >= self.fields.len() {
                return Err(semantic(
                    "hnp.split.index",
                    format!("split after {} fields is not proper for {} fields", s.index, self.fields.len()),
                ));
            }
        }
        let facts = MultiFieldFacts {
            pairwise_closure_disjoint: self.pairwise_closure_disjoint,
            intersection: self
                .intersection
                .as_ref()
                .map(|i| IntersectionProfile { sha_trivial: i.sha_trivial, sha_omega_trivial: i.sha_omega_trivial }),
            split: self.split.as_ref().map(|s| SplitWitness {
                index: s.index,
                kind: match s.kind {
                    SplitKindTag::Intersection => SplitKind::Intersection,
                    SplitKindTag::Base => SplitKind::Base,
                },
            }),
            prime_family: self.prime_family.as_ref().map(|p| PrimeFamilyFacts {
                p: p.p,
                fields_distinct: p.fields_distinct,
                compositum_degree_exceeds_p2: p.compositum_degree_exceeds_p2,
                some_local_degree_exceeds_p: p.some_local_degree_exceeds_p,
                some_factor_cyclic: p.some_factor_cyclic,
            }),
        };
        Ok((profiles, facts))
    }
}

/// The two shapes a units block can take.
pub enum UnitsQuery<'a> {
    OverQ(&'a [UnitFieldBlock]),
    General(UnitIndexInput),
}

impl UnitsBlock {
    fn check(&self) -> Result<(), CliError> {
        self.query().map(|_| ())
    }

    pub fn query(&self) -> Result<UnitsQuery<'_>, CliError> {
        let general = self.torsion_index.is_some()
            || self.degrees.is_some()
            || self.free_rank.is_some()
            || self.norm_images.is_some();
        match (&self.fields, general) {
            (Some(_), true) => Err(semantic("units", "give either fields or the general data, not both")),
            (None, false) => Err(semantic("units", "give fields, or torsion_index and degrees")),
            (Some(fields), false) => {
                if fields.is_empty() {
                    return Err(semantic("units.fields", "no fields"));
                }
                for (i, f) in fields.iter().enumerate() {
                    if f.degree == 0 {
                        return Err(semantic(format!("units.fields[{i}].degree"), "must be positive"));
                    }
                    if let Some(s) = f.sign {
                        if s != 1 && s != -1 {
                            return Err(semantic(format!("units.fields[{i}].sign"), "must be +1 or -1"));
                        }
                    }
                    if f.sign.is_some() && f.pell_d.is_some() {
                        return Err(semantic(format!("units.fields[{i}].pell_d"), "give sign or pell_d, not both"));
                    }
                    if f.pell_d.is_some() && f.degree != 2 {
                        return Err(semantic(format!("units.fields[{i}].pell_d"), "pell_d needs a quadratic field"));
                    }
                }
                Ok(UnitsQuery::OverQ(fields))
            }
            (None, true) => {
                let torsion = self.torsion_index.ok_or_else(|| semantic("units.torsion_index", "required"))?;
                let degrees = self.degrees.clone().ok_or_else(|| semantic("units.degrees", "required"))?;
                if degrees.is_empty() {
                    return Err(semantic("units.degrees", "no degrees"));
                }
                if let Some(i) = degrees.iter().position(|&d| d == 0) {
                    return Err(semantic(format!("units.degrees[{i}]"), "must be positive"));
                }
                let free_part_data = match (self.free_rank, &self.norm_images) {
                    (None, None) => None,
                    (Some(rank), images) => {
                        let images = images.clone().unwrap_or_default();
                        if let Some(i) = images.iter().position(|v| v.len() != rank) {
                            return Err(semantic(
                                format!("units.norm_images[{i}]"),
                                format!("expected {rank} coordinates"),
                            ));
                        }
                        Some(FreePartData { rank, norm_images: images })
                    }
                    (None, Some(_)) => return Err(semantic("units.free_rank", "required with norm_images")),
                };
                Ok(UnitsQuery::General(UnitIndexInput {
                    torsion_index: positive("units.torsion_index", torsion)?,
                    degrees,
                    free_part_data,
                }))
            }
        }
    }
}
