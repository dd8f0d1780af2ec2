//! Ono invariants `E_S(L/k)`, `E_S^+(L/k)`, `E^0(L/k)` and the class number
//! of the multinorm-one torus.
//!
//! Everything here is exact rational arithmetic on indices the caller
//! supplies. A formula whose result should be a class number is checked for
//! integrality; failure means the inputs are inconsistent, not that the
//! formula is wrong.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::kummer::{common_intersection_exponent, KummerFamily};
use crate::localnorm::{global_local_factor, LocalNormError, LocalPlaceData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OnoError {
    #[error("{what} = {value} is not a positive integer")]
    NonIntegralClassNumber { what: String, value: BigRational },
    #[error("narrow data missing")]
    MissingNarrowData,
    #[error("degree-zero data missing")]
    MissingDegreeZeroData,
    #[error("{0} must be positive")]
    NonPositive(String),
    #[error("residue field data: {0}")]
    BadResidueData(String),
    #[error("supplied residue norm index {supplied} but the norm map gives {computed}")]
    ResidueMismatch { supplied: BigUint, computed: BigUint },
    #[error("degree image is zero, cokernel infinite")]
    InfiniteCokernel,
    #[error(transparent)]
    LocalNorm(#[from] LocalNormError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NarrowData {
    pub hs_plus_l: BigUint,
    pub hs_plus_k: BigUint,
    pub q_phi: BigRational,
    /// `[O_{k,S}^{×+} : N(O_{L,S}^{×+})]`.
    pub unit_index_plus: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeZeroData {
    pub h0_l: BigUint,
    pub h0_k: BigUint,
    pub q_phi0: BigRational,
    /// `[U_k : N(U_L)]`.
    pub uk_index: BigUint,
    /// `[F_q^× : N(∏ F_{q_i}^×)]`.
    pub residue_norm_index: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassNumberContext {
    pub hs_l: BigUint,
    pub hs_k: BigUint,
    pub sha_order: BigUint,
    /// `[L_ab : k]`.
    pub lab_index: BigUint,
    /// `[O_{k,S}^× : N(O_{L,S}^×)]`.
    pub unit_index: BigUint,
    /// `[U_{k,S} : N(U_{L,S})]`.
    pub adelic_unit_index: BigUint,
    pub narrow: Option<NarrowData>,
    pub degree_zero: Option<DegreeZeroData>,
}

impl ClassNumberContext {
    pub fn new(hs_l: u64, hs_k: u64, sha_order: u64, lab_index: u64, unit_index: u64, adelic_unit_index: u64) -> Self {
        Self {
            hs_l: hs_l.into(),
            hs_k: hs_k.into(),
            sha_order: sha_order.into(),
            lab_index: lab_index.into(),
            unit_index: unit_index.into(),
            adelic_unit_index: adelic_unit_index.into(),
            narrow: None,
            degree_zero: None,
        }
    }

    pub fn validate(&self) -> Result<(), OnoError> {
        let ints = [
            ("hS_L", &self.hs_l),
            ("hS_k", &self.hs_k),
            ("sha_order", &self.sha_order),
            ("Lab_index", &self.lab_index),
            ("unit_index", &self.unit_index),
            ("adelic_unit_index", &self.adelic_unit_index),
        ];
        positive_all(&ints)?;
        if let Some(n) = &self.narrow {
            positive_all(&[
                ("hS_plus_L", &n.hs_plus_l),
                ("hS_plus_k", &n.hs_plus_k),
                ("unit_index_plus", &n.unit_index_plus),
            ])?;
            positive_rat("q_phi", &n.q_phi)?;
        }
        if let Some(z) = &self.degree_zero {
            positive_all(&[
                ("h0_L", &z.h0_l),
                ("h0_k", &z.h0_k),
                ("Uk_index", &z.uk_index),
                ("residue_norm_index", &z.residue_norm_index),
            ])?;
            positive_rat("q_phi0", &z.q_phi0)?;
        }
        Ok(())
    }
}

fn positive_all(xs: &[(&str, &BigUint)]) -> Result<(), OnoError> {
    match xs.iter().find(|(_, v)| v.is_zero()) {
        Some((name, _)) => Err(OnoError::NonPositive((*name).to_string())),
        None => Ok(()),
    }
}

fn positive_rat(name: &str, q: &BigRational) -> Result<(), OnoError> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(OnoError::NonPositive(name.to_string()))
    }
}

fn rat(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// The value as a positive integer, or `NonIntegralClassNumber`.
fn positive_integer(what: &str, value: BigRational) -> Result<BigUint, OnoError> {
    if value.is_integer() && value.is_positive() {
        Ok(value.to_integer().to_biguint().expect("positive"))
    } else {
        Err(OnoError::NonIntegralClassNumber { what: what.to_string(), value })
    }
}

/// An Ono invariant together with the torus class number it implies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnoEvaluation {
    pub value: BigRational,
    pub implied_class_number: BigUint,
}

/// `E_S = |Sha| [U_{k,S} : N U_{L,S}] / ([L_ab:k] [O_{k,S}^× : N O_{L,S}^×])`,
/// with the implied `h_S(T) = h_S(L) / (h_S(k) E_S)`.
pub fn eval_es(ctx: &ClassNumberContext) -> Result<OnoEvaluation, OnoError> {
    ctx.validate()?;
    let value = rat(&ctx.sha_order) * rat(&ctx.adelic_unit_index) / (rat(&ctx.lab_index) * rat(&ctx.unit_index));
    let h = rat(&ctx.hs_l) / (rat(&ctx.hs_k) * &value);
    Ok(OnoEvaluation { implied_class_number: positive_integer("h_S(T)", h)?, value })
}

/// `E_S^+ = |Sha| [U_{k,S} : N U_{L,S}] / ([L_ab:k] q(φ) [O^{×+} : N O^{×+}])`.
pub fn eval_es_plus(ctx: &ClassNumberContext) -> Result<OnoEvaluation, OnoError> {
    ctx.validate()?;
    let n = ctx.narrow.as_ref().ok_or(OnoError::MissingNarrowData)?;
    let value =
        rat(&ctx.sha_order) * rat(&ctx.adelic_unit_index) / (rat(&ctx.lab_index) * &n.q_phi * rat(&n.unit_index_plus));
    let h = rat(&n.hs_plus_l) / (rat(&n.hs_plus_k) * &value);
    Ok(OnoEvaluation { implied_class_number: positive_integer("h_S^+(T)", h)?, value })
}

/// `E^0 = |Sha| / [L_ab:k] · q(φ^0) · [U_k : N U_L] / [F_q^× : N ∏ F_{q_i}^×]`.
pub fn eval_e0(ctx: &ClassNumberContext) -> Result<OnoEvaluation, OnoError> {
    ctx.validate()?;
    let z = ctx.degree_zero.as_ref().ok_or(OnoError::MissingDegreeZeroData)?;
    let value = rat(&ctx.sha_order) / rat(&ctx.lab_index) * &z.q_phi0 * rat(&z.uk_index) / rat(&z.residue_norm_index);
    let h = rat(&z.h0_l) / (rat(&z.h0_k) * &value);
    Ok(OnoEvaluation { implied_class_number: positive_integer("h^0(T)", h)?, value })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusClassNumber {
    pub class_number: BigUint,
    /// `τ(T) = [L_ab:k] / |Sha|`.
    pub tamagawa: BigRational,
}

/// `h(T) = h(L)/h(k) · [L_ab:k]/|Sha| · [O_k^× : N O_L^×] / [U_k : N U_L]`,
/// reading `hS_L`, `hS_k` as the ordinary class numbers.
pub fn eval_torus_class_number(ctx: &ClassNumberContext) -> Result<TorusClassNumber, OnoError> {
    ctx.validate()?;
    let tamagawa = rat(&ctx.lab_index) / rat(&ctx.sha_order);
    let h = rat(&ctx.hs_l) / rat(&ctx.hs_k) * &tamagawa * rat(&ctx.unit_index) / rat(&ctx.adelic_unit_index);
    Ok(TorusClassNumber { class_number: positive_integer("h(T)", h)?, tamagawa })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmEvaluation {
    pub value: BigRational,
    /// False when the value is not a positive integer, so the CM data cannot
    /// all be correct.
    pub integral: bool,
}

/// `h_K / h_{K^+} · 1 / (Q_{K/K^+} · 2^{t-1})`.
pub fn eval_cm_case(
    h_k: &BigUint,
    h_k_plus: &BigUint,
    q_unit_index: &BigUint,
    t: u32,
) -> Result<CmEvaluation, OnoError> {
    positive_all(&[("h_K", h_k), ("h_K+", h_k_plus), ("Q", q_unit_index)])?;
    if t == 0 {
        return Err(OnoError::NonPositive("t".into()));
    }
    let two = BigUint::from(2u32).pow(t - 1);
    let value = rat(h_k) / (rat(h_k_plus) * rat(q_unit_index) * rat(&two));
    Ok(CmEvaluation { integral: value.is_integer(), value })
}

/// `h^+(K) = h_K^* · 2^{t-1}` for a quadratic field `K` with `t` ramified
/// primes, as a check on supplied values.
pub fn narrow_genus_identity(h_plus: &BigUint, h_star: &BigUint, t: u32) -> bool {
    t >= 1 && *h_plus == h_star * BigUint::from(2u32).pow(t - 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealFormContext {
    /// `[I_{L,S}^{(1)} : P_{L,S}^{(1)}]`.
    pub i1_over_p1: BigUint,
    /// `[O_{k,S}^× ∩ N(L^×) : N(O_{L,S}^×)]`.
    pub unit_meet_index: BigUint,
    /// `[U_{k,S} ∩ N(A_L^×) : N(U_{L,S})]`.
    pub adelic_meet_index: BigUint,
}

/// `h_S(T)` from ideal data.
pub fn eval_hs_ideal_form(ictx: &IdealFormContext) -> Result<BigUint, OnoError> {
    positive_all(&[
        ("I1_over_P1", &ictx.i1_over_p1),
        ("unit_meet_index", &ictx.unit_meet_index),
        ("adelic_meet_index", &ictx.adelic_meet_index),
    ])?;
    let v = rat(&ictx.i1_over_p1) * rat(&ictx.unit_meet_index) / rat(&ictx.adelic_meet_index);
    positive_integer("h_S(T)", v)
}

/// `E_S = |Sha| · (local factor) / ([L_ab:k] · [O_{k,S}^× : N O_{L,S}^×])`,
/// with the local factor from [`global_local_factor`].
pub fn eval_refined_es(
    sha_order: &BigUint,
    lab_index: &BigUint,
    places: &[LocalPlaceData],
    unit_index: &BigUint,
) -> Result<BigRational, OnoError> {
    positive_all(&[("sha_order", sha_order), ("Lab_index", lab_index), ("unit_index", unit_index)])?;
    let local = global_local_factor(places)?;
    Ok(rat(sha_order) * rat(&local) / (rat(lab_index) * rat(unit_index)))
}

/// `[L_ab : k]` for a Kummer family: all fields are abelian, so `L_ab` is
/// their intersection.
pub fn lab_index_kummer(f: &KummerFamily) -> BigUint {
    BigUint::from(f.p).pow(common_intersection_exponent(f))
}

/// `[F_q^× : N(∏ F_{q_i}^×)]` where `q_i = q^{f_i}` and `K_i` has degree
/// `d_i` over `k`. The norm on the `i`-th factor is the residue norm raised to
/// `d_i / f_i`, and the residue norm is onto, so the index is
/// `gcd(q - 1, d_i / f_i for all i)`.
pub fn residue_norm_index(q: u64, residue_sizes: &[u64], degrees: &[u64]) -> Result<BigUint, OnoError> {
    if q < 2 {
        return Err(OnoError::BadResidueData(format!("q = {q}")));
    }
    if residue_sizes.is_empty() || residue_sizes.len() != degrees.len() {
        return Err(OnoError::BadResidueData("need one residue field size per degree".into()));
    }
    let mut g = BigUint::from(q - 1);
    for (&qi, &d) in residue_sizes.iter().zip(degrees) {
        let f = residue_degree(q, qi).ok_or_else(|| OnoError::BadResidueData(format!("{qi} is not a power of {q}")))?;
        if d == 0 || d % f != 0 {
            return Err(OnoError::BadResidueData(format!("residue degree {f} does not divide {d}")));
        }
        g = g.gcd(&BigUint::from(d / f));
    }
    Ok(g)
}

fn residue_degree(q: u64, qi: u64) -> Option<u64> {
    let (mut f, mut acc) = (0u64, 1u64);
    while acc < qi {
        acc = acc.checked_mul(q)?;
        f += 1;
    }
    (acc == qi && f >= 1).then_some(f)
}

/// Compares the supplied residue index in `ctx` with [`residue_norm_index`].
pub fn check_residue_norm_index(
    ctx: &ClassNumberContext,
    q: u64,
    residue_sizes: &[u64],
    degrees: &[u64],
) -> Result<(), OnoError> {
    let z = ctx.degree_zero.as_ref().ok_or(OnoError::MissingDegreeZeroData)?;
    let computed = residue_norm_index(q, residue_sizes, degrees)?;
    if computed == z.residue_norm_index {
        Ok(())
    } else {
        Err(OnoError::ResidueMismatch { supplied: z.residue_norm_index.clone(), computed })
    }
}

/// `|coker φ^0| = |Z / deg_k(N(A_L^×))|`, given generators of the degree image.
pub fn coker_phi0_order(degree_generators: &[BigInt]) -> Result<BigUint, OnoError> {
    let g = degree_generators.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        Err(OnoError::InfiniteCokernel)
    } else {
        Ok(g.magnitude().clone())
    }
}

/// The `q`-symbol `|coker φ^0| / |ker φ^0|` when both orders are known.
pub fn q_phi0_from_orders(coker: &BigUint, ker: &BigUint) -> Result<BigRational, OnoError> {
    positive_all(&[("coker", coker), ("ker", ker)])?;
    Ok(rat(coker) / rat(ker))
}
