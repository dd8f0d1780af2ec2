//! Sufficient conditions for the Hasse norm principle of `L = K_1 × ... × K_r`.
//!
//! The engine does not compute Galois closures or cohomology. It takes
//! asserted structural facts, checks them for internal consistency, and
//! reports the first rule of the catalogue whose hypotheses are met. It never
//! claims that the principle fails.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::abelian::{FiniteAbelianGroup, SubgroupGens};
use crate::arith::is_prime;
use crate::kummer::{self, KummerError, KummerFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnpError {
    #[error("no fields given")]
    NoFields,
    #[error("field {index}: {reason}")]
    InconsistentProfile { index: usize, reason: String },
    #[error("inconsistent facts: {0}")]
    InconsistentFacts(String),
    #[error("split witness {index} outside 1..={max}")]
    WitnessOutOfRange { index: usize, max: usize },
    #[error(transparent)]
    Kummer(#[from] KummerError),
}

/// Isomorphism type of `Gal(K^c/k)`, where `n = [K:k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureGroup {
    Cyclic,
    /// `D_n`, of order `2n`.
    Dihedral,
    /// `S_n`.
    Symmetric,
    /// `A_n`.
    Alternating,
    Other(String),
}

impl fmt::Display for ClosureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureGroup::Cyclic => f.write_str("cyclic"),
            ClosureGroup::Dihedral => f.write_str("dihedral"),
            ClosureGroup::Symmetric => f.write_str("symmetric"),
            ClosureGroup::Alternating => f.write_str("alternating"),
            ClosureGroup::Other(s) => write!(f, "other({s})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldProfile {
    pub degree: u64,
    pub is_galois: bool,
    pub is_abelian: bool,
    pub is_cyclic: bool,
    pub closure_group: ClosureGroup,
    /// `Sha^3(G, Z) = 0` for `G = Gal(K/k)`, when known.
    pub sha3_trivial: Option<bool>,
}

impl FieldProfile {
    pub fn cyclic(degree: u64) -> Self {
        Self {
            degree,
            is_galois: true,
            is_abelian: true,
            is_cyclic: true,
            closure_group: ClosureGroup::Cyclic,
            sha3_trivial: None,
        }
    }

    /// A non-Galois field of degree `n` whose closure has the given type.
    pub fn with_closure(degree: u64, closure_group: ClosureGroup) -> Self {
        Self { degree, is_galois: false, is_abelian: false, is_cyclic: false, closure_group, sha3_trivial: None }
    }

    fn check(&self, index: usize) -> Result<(), HnpError> {
        let bad = |reason: &str| Err(HnpError::InconsistentProfile { index, reason: reason.to_string() });
        let n = self.degree;
        if n < 2 {
            return bad("degree must be at least 2");
        }
        if self.is_cyclic && !self.is_abelian {
            return bad("cyclic but not abelian");
        }
        if self.is_abelian && !self.is_galois {
            return bad("abelian but not Galois");
        }
        if self.is_cyclic && self.sha3_trivial == Some(false) {
            return bad("cyclic groups have trivial Sha^3");
        }
        // A field with abelian closure is Galois, with group that closure.
        let cyclic_tag = self.closure_group == ClosureGroup::Cyclic;
        if cyclic_tag != self.is_cyclic {
            return bad("closure group tag and cyclic flag disagree");
        }
        let closure_order_is_n = match self.closure_group {
            ClosureGroup::Cyclic => Some(true),
            ClosureGroup::Dihedral => Some(false),
            ClosureGroup::Symmetric => Some(n <= 2),
            ClosureGroup::Alternating => Some(n == 3),
            ClosureGroup::Other(_) => None,
        };
        if let Some(same) = closure_order_is_n {
            if same != self.is_galois {
                return bad("Galois flag contradicts the order of the closure group");
            }
        }
        let closure_abelian = match self.closure_group {
            ClosureGroup::Cyclic => Some(true),
            ClosureGroup::Dihedral => Some(n <= 2),
            ClosureGroup::Symmetric => Some(n <= 2),
            ClosureGroup::Alternating => Some(n <= 3),
            ClosureGroup::Other(_) => None,
        };
        if closure_abelian == Some(false) && self.is_abelian {
            return bad("abelian flag contradicts a non-abelian closure group");
        }
        Ok(())
    }
}

/// Facts about `F = ∩ K_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntersectionProfile {
    /// `Sha(F/k) = 0`.
    pub sha_trivial: Option<bool>,
    /// `Sha_ω(F/k) = 0`.
    pub sha_omega_trivial: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    /// `K_1⋯K_i ∩ K_{i+1}⋯K_r = F`.
    Intersection,
    /// `K_1⋯K_i ∩ K_{i+1}⋯K_r = k`.
    Base,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    /// The split happens after the first `index` fields.
    pub index: usize,
    pub kind: SplitKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFamilyFacts {
    pub p: u64,
    pub fields_distinct: bool,
    pub compositum_degree_exceeds_p2: bool,
    pub some_local_degree_exceeds_p: bool,
    pub some_factor_cyclic: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiFieldFacts {
    /// `K_1^c ∩ K_2^c = k`.
    pub pairwise_closure_disjoint: Option<bool>,
    pub intersection: Option<IntersectionProfile>,
    pub split: Option<SplitWitness>,
    pub prime_family: Option<PrimeFamilyFacts>,
}

impl MultiFieldFacts {
    fn sha_f(&self) -> Option<bool> {
        self.intersection.as_ref().and_then(|i| i.sha_trivial)
    }

    fn sha_omega_f(&self) -> Option<bool> {
        self.intersection.as_ref().and_then(|i| i.sha_omega_trivial)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    R1a,
    R1b,
    R1c,
    R1d,
    R1e,
    R2a,
    R2b,
    R2c,
    R2d,
    R3a,
    R3b,
    R3c,
}

impl RuleId {
    pub const ALL: [RuleId; 12] = [
        RuleId::R1a,
        RuleId::R1b,
        RuleId::R1c,
        RuleId::R1d,
        RuleId::R1e,
        RuleId::R2a,
        RuleId::R2b,
        RuleId::R2c,
        RuleId::R2d,
        RuleId::R3a,
        RuleId::R3b,
        RuleId::R3c,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RuleId::R1a => "1a",
            RuleId::R1b => "1b",
            RuleId::R1c => "1c",
            RuleId::R1d => "1d",
            RuleId::R1e => "1e",
            RuleId::R2a => "2a",
            RuleId::R2b => "2b",
            RuleId::R2c => "2c",
            RuleId::R2d => "2d",
            RuleId::R3a => "3a",
            RuleId::R3b => "3b",
            RuleId::R3c => "3c",
        }
    }

    pub fn case(self) -> u8 {
        self.label().as_bytes()[0] - b'0'
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.label().eq_ignore_ascii_case(s.trim()))
    }

    pub fn condition(self) -> &'static str {
        match self {
            RuleId::R1a => "r = 1, K/k Galois with group G and Sha^3(G, Z) = 0 (automatic for cyclic G)",
            RuleId::R1b => "r = 1, [K:k] prime",
            RuleId::R1c => "r = 1, [K:k] = n and Gal(K^c/k) dihedral of order 2n",
            RuleId::R1d => "r = 1, [K:k] = n and Gal(K^c/k) = S_n",
            RuleId::R1e => "r = 1, [K:k] = n >= 5 and Gal(K^c/k) = A_n",
            RuleId::R2a => "r = 2, one of K_1, K_2 cyclic over k",
            RuleId::R2b => "r = 2, K_1^c and K_2^c meet only in k",
            RuleId::R2c => "r = 2, K_1, K_2 abelian and Sha(F/k) = 0 for F = K_1 ∩ K_2",
            RuleId::R2d => "r = 2, Sha_ω(F/k) = 0 for F = K_1 ∩ K_2",
            RuleId::R3a => {
                "r >= 2, all K_i Galois, K_1⋯K_i ∩ K_{i+1}⋯K_r = F = ∩ K_j for some 1 <= i < r, and Sha_ω(F/k) = 0"
            }
            RuleId::R3b => "r >= 2, all K_i Galois and K_1⋯K_i ∩ K_{i+1}⋯K_r = k for some 1 <= i < r",
            RuleId::R3c => {
                "r >= 2, distinct K_i of prime degree p, one of them cyclic, and the compositum has degree > p^2 \
                 or some local degree > p"
            }
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds(RuleId),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub explanation: String,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self.outcome, Outcome::Holds(_))
    }

    pub fn rule(&self) -> Option<RuleId> {
        match self.outcome {
            Outcome::Holds(r) => Some(r),
            Outcome::Inconclusive => None,
        }
    }
}

fn check_inputs(profiles: &[FieldProfile], facts: &MultiFieldFacts) -> Result<(), HnpError> {
    if profiles.is_empty() {
        return Err(HnpError::NoFields);
    }
    for (i, p) in profiles.iter().enumerate() {
        p.check(i + 1)?;
    }
    let r = profiles.len();
    if let Some(w) = facts.split {
        if r < 2 || w.index == 0 || w.index >= r {
            return Err(HnpError::WitnessOutOfRange { index: w.index, max: r.saturating_sub(1) });
        }
    }
    if facts.sha_omega_f() == Some(true) && facts.sha_f() == Some(false) {
        return Err(HnpError::InconsistentFacts("Sha(F/k) is a subgroup of Sha_ω(F/k)".into()));
    }
    if let Some(pf) = &facts.prime_family {
        let any_cyclic = profiles.iter().any(|p| p.is_cyclic);
        if pf.some_factor_cyclic && !any_cyclic {
            return Err(HnpError::InconsistentFacts("some_factor_cyclic set but no profile is cyclic".into()));
        }
        if !pf.some_factor_cyclic && any_cyclic {
            return Err(HnpError::InconsistentFacts("a profile is cyclic but some_factor_cyclic is false".into()));
        }
    }
    Ok(())
}

fn applies(rule: RuleId, profiles: &[FieldProfile], facts: &MultiFieldFacts) -> bool {
    let r = profiles.len();
    let all_galois = profiles.iter().all(|p| p.is_galois);
    let one = r == 1;
    let two = r == 2;
    let k = &profiles[0];
    match rule {
        RuleId::R1a => one && k.is_galois && (k.is_cyclic || k.sha3_trivial == Some(true)),
        RuleId::R1b => one && is_prime(k.degree),
        RuleId::R1c => one && k.closure_group == ClosureGroup::Dihedral,
        RuleId::R1d => one && k.closure_group == ClosureGroup::Symmetric,
        RuleId::R1e => one && k.closure_group == ClosureGroup::Alternating && k.degree >= 5,
        RuleId::R2a => two && profiles.iter().any(|p| p.is_cyclic),
        RuleId::R2b => two && facts.pairwise_closure_disjoint == Some(true),
        RuleId::R2c => two && profiles.iter().all(|p| p.is_abelian) && facts.sha_f() == Some(true),
        RuleId::R2d => two && facts.sha_omega_f() == Some(true),
        RuleId::R3a => {
            r >= 2
                && all_galois
                && matches!(facts.split, Some(SplitWitness { kind: SplitKind::Intersection, .. }))
                && facts.sha_omega_f() == Some(true)
        }
        RuleId::R3b => r >= 2 && all_galois && matches!(facts.split, Some(SplitWitness { kind: SplitKind::Base, .. })),
        RuleId::R3c => facts.prime_family.as_ref().is_some_and(|pf| {
            r >= 2
                && is_prime(pf.p)
                && profiles.iter().all(|f| f.degree == pf.p)
                && pf.fields_distinct
                && pf.some_factor_cyclic
                && (pf.compositum_degree_exceeds_p2 || pf.some_local_degree_exceeds_p)
        }),
    }
}

/// First rule, in catalogue order, whose hypotheses hold.
pub fn decide_hnp(profiles: &[FieldProfile], facts: &MultiFieldFacts) -> Result<Verdict, HnpError> {
    check_inputs(profiles, facts)?;
    let hit = RuleId::ALL.into_iter().find(|&rule| applies(rule, profiles, facts));
    Ok(match hit {
        Some(rule) => Verdict {
            outcome: Outcome::Holds(rule),
            explanation: format!("HNP holds by rule {rule}: {}", rule.condition()),
        },
        None => Verdict {
            outcome: Outcome::Inconclusive,
            explanation: format!("no rule of the catalogue applies to these {} field(s)", profiles.len()),
        },
    })
}

/// Re-derives the verdict rule by rule, without going through the engine's
/// rule table, and reports the first disagreement.
pub fn validate_verdict(profiles: &[FieldProfile], facts: &MultiFieldFacts, v: &Verdict) -> Result<(), String> {
    let r = profiles.len();
    let pre = |rule: RuleId| -> bool {
        let k = &profiles[0];
        match rule.case() {
            1 if r != 1 => false,
            2 if r != 2 => false,
            3 if r < 2 => false,
            _ => match rule {
                RuleId::R1a => {
                    k.is_galois && (k.closure_group == ClosureGroup::Cyclic || matches!(k.sha3_trivial, Some(true)))
                }
                RuleId::R1b => (2..k.degree).take_while(|d| d * d <= k.degree).all(|d| !k.degree.is_multiple_of(d)),
                RuleId::R1c => matches!(k.closure_group, ClosureGroup::Dihedral),
                RuleId::R1d => matches!(k.closure_group, ClosureGroup::Symmetric),
                RuleId::R1e => matches!(k.closure_group, ClosureGroup::Alternating) && k.degree > 4,
                RuleId::R2a => profiles[0].is_cyclic || profiles[1].is_cyclic,
                RuleId::R2b => facts.pairwise_closure_disjoint.unwrap_or(false),
                RuleId::R2c => {
                    profiles[0].is_abelian
                        && profiles[1].is_abelian
                        && facts.intersection.as_ref().and_then(|i| i.sha_trivial).unwrap_or(false)
                }
                RuleId::R2d => facts.intersection.as_ref().and_then(|i| i.sha_omega_trivial).unwrap_or(false),
                RuleId::R3a | RuleId::R3b => {
                    let want = if rule == RuleId::R3a { SplitKind::Intersection } else { SplitKind::Base };
                    let split_ok = facts.split.is_some_and(|w| w.kind == want && (1..r).contains(&w.index));
                    let omega_ok = rule == RuleId::R3b
                        || facts.intersection.as_ref().and_then(|i| i.sha_omega_trivial).unwrap_or(false);
                    profiles.iter().all(|p| p.is_galois) && split_ok && omega_ok
                }
                RuleId::R3c => match &facts.prime_family {
                    None => false,
                    Some(pf) => {
                        let p_prime = pf.p >= 2 && (2..pf.p).take_while(|d| d * d <= pf.p).all(|d| pf.p % d != 0);
                        p_prime
                            && profiles.iter().all(|f| f.degree == pf.p)
                            && pf.fields_distinct
                            && pf.some_factor_cyclic
                            && (pf.compositum_degree_exceeds_p2 || pf.some_local_degree_exceeds_p)
                    }
                },
            },
        }
    };
    let first = RuleId::ALL.into_iter().find(|&rule| pre(rule));
    match (v.outcome, first) {
        (Outcome::Holds(a), Some(b)) if a == b => Ok(()),
        (Outcome::Inconclusive, None) => Ok(()),
        (Outcome::Holds(a), Some(b)) => Err(format!("verdict names rule {a} but rule {b} applies first")),
        (Outcome::Holds(a), None) => Err(format!("verdict names rule {a} but its hypotheses fail")),
        (Outcome::Inconclusive, Some(b)) => Err(format!("verdict is inconclusive but rule {b} applies")),
    }
}

/// The catalogue, one line per rule, optionally filtered by a
/// case-insensitive substring such as `"case 3"` or `"2b"`.
pub fn explain_rules(filter: Option<&str>) -> Vec<String> {
    let needle = filter.map(|f| f.trim().to_lowercase());
    RuleId::ALL
        .into_iter()
        .map(|rule| format!("{} (case {}): {}", rule.label(), rule.case(), rule.condition()))
        .filter(|line| needle.as_ref().is_none_or(|n| line.to_lowercase().contains(n.as_str())))
        .collect()
}

/// When `K_1^c ∩ K_2^c = k`, the Sha-term of the auxiliary torus in
/// Morishita's class number formula is trivial.
pub fn morishita_note(profiles: &[FieldProfile], facts: &MultiFieldFacts) -> Option<String> {
    (profiles.len() == 2 && facts.pairwise_closure_disjoint == Some(true)).then(|| {
        "K_1^c ∩ K_2^c = k, so the Sha term of the auxiliary torus in Morishita's class number formula equals 1"
            .to_string()
    })
}

/// Profiles and facts that follow from the Kummer description alone.
///
/// Every field is cyclic. The common intersection of a valid family is `k`,
/// so `Sha(F/k)` and `Sha_ω(F/k)` vanish. For two fields the closures are the
/// fields themselves, and the split witness is the first contiguous split
/// whose two composita meet in `k`.
pub fn kummer_facts(f: &KummerFamily) -> Result<(Vec<FieldProfile>, MultiFieldFacts), HnpError> {
    kummer::validate_and_normalize(f)?;
    let q = f.modulus();
    let profiles: Vec<FieldProfile> = (0..f.len())
        .map(|i| kummer::field_degree_exponent(f, i).map(|e| FieldProfile::cyclic(f.p.pow(e))))
        .collect::<Result<_, _>>()?;
    let r = f.len();
    let ambient =
        FiniteAbelianGroup::from_cyclic_orders([BigUint::from(q), BigUint::from(q)]).expect("positive orders");
    let span = |range: std::ops::Range<usize>| -> BigUint {
        let gens: Vec<Vec<BigInt>> =
            f.vectors[range].iter().map(|v| vec![BigInt::from(v[0]), BigInt::from(v[1])]).collect();
        SubgroupGens::new(ambient.clone(), gens).expect("rank 2 generators").order()
    };
    let split = (1..r).find_map(|i| {
        let (a, b, ab) = (span(0..i), span(i..r), span(0..r));
        (a * b == ab).then_some(SplitWitness { index: i, kind: SplitKind::Base })
    });
    let pairwise = (r == 2).then(|| span(0..1) * span(1..2) == span(0..2));
    let degrees: Vec<u64> = profiles.iter().map(|p| p.degree).collect();
    let prime_family = (r >= 2 && degrees.iter().all(|&d| d == f.p)).then(|| PrimeFamilyFacts {
        p: f.p,
        fields_distinct: true,
        compositum_degree_exceeds_p2: span(0..r) > BigUint::from(f.p * f.p),
        some_local_degree_exceeds_p: false,
        some_factor_cyclic: true,
    });
    Ok((
        profiles,
        MultiFieldFacts {
            pairwise_closure_disjoint: pairwise,
            intersection: Some(IntersectionProfile { sha_trivial: Some(true), sha_omega_trivial: Some(true) }),
            split,
            prime_family,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(profiles: &[FieldProfile], facts: &MultiFieldFacts) -> Option<RuleId> {
        let v = decide_hnp(profiles, facts).unwrap();
        validate_verdict(profiles, facts, &v).unwrap();
        v.rule()
    }

    fn other(degree: u64) -> FieldProfile {
        FieldProfile::with_closure(degree, ClosureGroup::Other("G".into()))
    }

    #[test]
    fn case_one() {
        let none = MultiFieldFacts::default();
        assert_eq!(rule(&[FieldProfile::cyclic(12)], &none), Some(RuleId::R1a));
        assert_eq!(rule(&[FieldProfile::with_closure(7, ClosureGroup::Symmetric)], &none), Some(RuleId::R1b));
        assert_eq!(rule(&[FieldProfile::with_closure(6, ClosureGroup::Symmetric)], &none), Some(RuleId::R1d));
        assert_eq!(rule(&[FieldProfile::with_closure(4, ClosureGroup::Dihedral)], &none), Some(RuleId::R1c));
        assert_eq!(rule(&[FieldProfile::with_closure(6, ClosureGroup::Alternating)], &none), Some(RuleId::R1e));
        assert_eq!(rule(&[FieldProfile::with_closure(4, ClosureGroup::Alternating)], &none), None);
        assert_eq!(rule(&[other(8)], &none), None);

        let mut klein = FieldProfile::cyclic(4);
        klein.is_cyclic = false;
        klein.closure_group = ClosureGroup::Other("V4".into());
        assert_eq!(rule(&[klein.clone()], &none), None);
        klein.sha3_trivial = Some(false);
        assert_eq!(rule(&[klein.clone()], &none), None);
        klein.sha3_trivial = Some(true);
        assert_eq!(rule(&[klein], &none), Some(RuleId::R1a));
    }

    #[test]
    fn case_two() {
        let none = MultiFieldFacts::default();
        assert_eq!(rule(&[FieldProfile::cyclic(9), other(6)], &none), Some(RuleId::R2a));
        assert_eq!(rule(&[other(6), FieldProfile::cyclic(9)], &none), Some(RuleId::R2a));
        assert_eq!(rule(&[other(6), other(8)], &none), None);
        let disjoint = MultiFieldFacts { pairwise_closure_disjoint: Some(true), ..Default::default() };
        assert_eq!(rule(&[other(6), other(8)], &disjoint), Some(RuleId::R2b));

        let mut v4 = FieldProfile::cyclic(4);
        v4.is_cyclic = false;
        v4.closure_group = ClosureGroup::Other("V4".into());
        let sha = MultiFieldFacts {
            intersection: Some(IntersectionProfile { sha_trivial: Some(true), sha_omega_trivial: None }),
            ..Default::default()
        };
        assert_eq!(rule(&[v4.clone(), v4.clone()], &sha), Some(RuleId::R2c));
        assert_eq!(rule(&[other(6), other(6)], &sha), None);
        let omega = MultiFieldFacts {
            intersection: Some(IntersectionProfile { sha_trivial: None, sha_omega_trivial: Some(true) }),
            ..Default::default()
        };
        assert_eq!(rule(&[other(6), other(6)], &omega), Some(RuleId::R2d));
    }

    #[test]
    fn case_three() {
        let mut v4 = FieldProfile::cyclic(4);
        v4.is_cyclic = false;
        v4.closure_group = ClosureGroup::Other("V4".into());
        let gal = vec![v4.clone(), v4.clone(), v4];
        let base =
            MultiFieldFacts { split: Some(SplitWitness { index: 1, kind: SplitKind::Base }), ..Default::default() };
        assert_eq!(rule(&gal, &base), Some(RuleId::R3b));
        let inter = MultiFieldFacts {
            split: Some(SplitWitness { index: 2, kind: SplitKind::Intersection }),
            intersection: Some(IntersectionProfile { sha_trivial: None, sha_omega_trivial: Some(true) }),
            ..Default::default()
        };
        assert_eq!(rule(&gal, &inter), Some(RuleId::R3a));
        let inter_only = MultiFieldFacts { intersection: None, ..inter.clone() };
        assert_eq!(rule(&gal, &inter_only), None);
        let nongal = vec![other(6), other(6), other(6)];
        assert_eq!(rule(&nongal, &base), None);

        let prime = |exceeds: bool| MultiFieldFacts {
            prime_family: Some(PrimeFamilyFacts {
                p: 3,
                fields_distinct: true,
                compositum_degree_exceeds_p2: exceeds,
                some_local_degree_exceeds_p: false,
                some_factor_cyclic: true,
            }),
            ..Default::default()
        };
        let cubics = vec![FieldProfile::cyclic(3), other(3), other(3)];
        assert_eq!(rule(&cubics, &prime(true)), Some(RuleId::R3c));
        assert_eq!(rule(&cubics, &prime(false)), None);
    }

    #[test]
    fn inconsistent_inputs() {
        let none = MultiFieldFacts::default();
        assert_eq!(decide_hnp(&[], &none), Err(HnpError::NoFields));
        let mut bad = FieldProfile::cyclic(5);
        bad.is_abelian = false;
        assert!(matches!(decide_hnp(&[bad], &none), Err(HnpError::InconsistentProfile { index: 1, .. })));
        let mut bad = FieldProfile::cyclic(5);
        bad.sha3_trivial = Some(false);
        assert!(decide_hnp(&[bad], &none).is_err());
        let mut bad = FieldProfile::with_closure(5, ClosureGroup::Dihedral);
        bad.is_galois = true;
        assert!(decide_hnp(&[bad], &none).is_err());
        assert!(decide_hnp(&[FieldProfile::with_closure(5, ClosureGroup::Cyclic)], &none).is_err());
        assert!(decide_hnp(&[FieldProfile::cyclic(1)], &none).is_err());

        let w = MultiFieldFacts { split: Some(SplitWitness { index: 2, kind: SplitKind::Base }), ..Default::default() };
        assert_eq!(decide_hnp(&[other(4), other(4)], &w), Err(HnpError::WitnessOutOfRange { index: 2, max: 1 }));
        let contradiction = MultiFieldFacts {
            intersection: Some(IntersectionProfile { sha_trivial: Some(false), sha_omega_trivial: Some(true) }),
            ..Default::default()
        };
        assert!(matches!(decide_hnp(&[other(4), other(4)], &contradiction), Err(HnpError::InconsistentFacts(_))));
    }

    #[test]
    fn validator_catches_wrong_verdicts() {
        let none = MultiFieldFacts::default();
        let profiles = [FieldProfile::cyclic(9), other(6)];
        let wrong = Verdict { outcome: Outcome::Holds(RuleId::R2b), explanation: String::new() };
        assert!(validate_verdict(&profiles, &none, &wrong).is_err());
        let wrong = Verdict { outcome: Outcome::Inconclusive, explanation: String::new() };
        assert!(validate_verdict(&profiles, &none, &wrong).is_err());
    }

    #[test]
    fn rule_listing() {
        assert_eq!(explain_rules(None).len(), 12);
        assert_eq!(explain_rules(Some("case 3")).len(), 3);
        assert_eq!(explain_rules(Some("Case 1")).len(), 5);
        assert!(explain_rules(Some("case 9")).is_empty());
        assert_eq!(RuleId::from_label("2B"), Some(RuleId::R2b));
    }

    #[test]
    fn morishita() {
        let disjoint = MultiFieldFacts { pairwise_closure_disjoint: Some(true), ..Default::default() };
        assert!(morishita_note(&[other(6), other(8)], &disjoint).is_some());
        assert!(morishita_note(&[other(6), other(8)], &MultiFieldFacts::default()).is_none());
        assert!(morishita_note(&[other(6)], &disjoint).is_none());
    }

    #[test]
    fn kummer_profiles() {
        let pair = KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [0, 1]]);
        let (profiles, facts) = kummer_facts(&pair).unwrap();
        assert_eq!(profiles, vec![FieldProfile::cyclic(27), FieldProfile::cyclic(27)]);
        assert_eq!(facts.pairwise_closure_disjoint, Some(true));
        assert_eq!(facts.split, Some(SplitWitness { index: 1, kind: SplitKind::Base }));
        assert_eq!(rule(&profiles, &facts), Some(RuleId::R2a));
        assert!(morishita_note(&profiles, &facts).is_some());

        let shared = KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [2, 3]]);
        assert!(matches!(kummer_facts(&shared), Err(HnpError::Kummer(KummerError::CommonIntersectionNotTrivial(1)))));
        let chain = KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [2, 3], [0, 1]]);
        assert_eq!(kummer_facts(&chain).unwrap().1.split, None);
        let nested = KummerFamily::new(3, 3, (5, 19), vec![[9, 0], [0, 1], [0, 3]]);
        let (profiles, facts) = kummer_facts(&nested).unwrap();
        assert_eq!(facts.pairwise_closure_disjoint, None);
        assert_eq!(facts.split, Some(SplitWitness { index: 1, kind: SplitKind::Base }));
        assert_eq!(rule(&profiles, &facts), Some(RuleId::R3b));

        let three = KummerFamily::new(3, 1, (2, 5), vec![[1, 0], [0, 1], [1, 1]]);
        let (profiles, facts) = kummer_facts(&three).unwrap();
        assert_eq!(facts.split, None);
        let pf = facts.prime_family.clone().unwrap();
        assert!(!pf.compositum_degree_exceeds_p2);
        assert_eq!(rule(&profiles, &facts), None);
    }
}
