//! Global unit norm indices `[O_{k,S}^× : N(O_{L,S}^×)]`.
//!
//! The index splits as `[μ_k : N(μ_L)] · [F_k : N(F_L)]`, where `F` is the
//! free part. Since `N(F_L) ⊇ F_k^d` with `d = gcd [K_i : k]`, the free factor
//! is a quotient of `(Z/d)^s`. Over `Q` with `S` archimedean only the sign of
//! `-1` matters, and for real quadratic fields that is the norm of the
//! fundamental unit, found from the continued fraction of `√d`.

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::abelian::{group_from_presentation, AbelianError, FiniteAbelianGroup, IntMatrix};
use crate::arith::is_squarefree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitsError {
    #[error("d = {0} must be a non-square integer >= 2")]
    BadPellArgument(u64),
    #[error("Q(√{0}) needs squarefree d >= 2")]
    NotSquarefree(u64),
    #[error("empty degree list")]
    NoDegrees,
    #[error("degree {0} is not positive")]
    BadDegree(u64),
    #[error("norm sign must be +1 or -1, got {0}")]
    BadSign(i8),
    #[error("torsion index must be positive")]
    BadTorsionIndex,
    #[error("cannot decide: all degrees even and the norm sign of field(s) {0:?} unknown")]
    InsufficientData(Vec<usize>),
    #[error("free quotient {group} is not killed by d = {d}")]
    FreeQuotientExponent { group: String, d: u64 },
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellSolution {
    pub d: u64,
    pub x: BigUint,
    pub y: BigUint,
    pub norm_sign: i8,
    pub period: usize,
}

impl PellSolution {
    /// `x^2 - d y^2 == norm_sign`, checked exactly.
    pub fn verify(&self) -> bool {
        let lhs = &self.x * &self.x;
        let rhs = BigUint::from(self.d) * &self.y * &self.y;
        match self.norm_sign {
            1 => lhs == rhs + 1u32,
            -1 => lhs + 1u32 == rhs,
            _ => false,
        }
    }
}

/// Least positive solution of `x^2 - d y^2 = ±1`.
pub fn pell_fundamental(d: u64) -> Result<PellSolution, UnitsError> {
    let a0 = d.sqrt();
    if d < 2 || a0 * a0 == d {
        return Err(UnitsError::BadPellArgument(d));
    }
    // √d = [a0; a1, ..., a_k] with a_k = 2 a0; m, q stay below 2√d.
    let (mut m, mut q, mut a) = (0u64, 1u64, a0);
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::from(a0));
    let (mut q_prev, mut qq) = (BigUint::zero(), BigUint::one());
    let mut period = 0;
    loop {
        m = a * q - m;
        q = (d - m * m) / q;
        a = (a0 + m) / q;
        period += 1;
        if a == 2 * a0 {
            break;
        }
        let p_next = BigUint::from(a) * &p + &p_prev;
        let q_next = BigUint::from(a) * &qq + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut qq, q_next);
    }
    let sol = PellSolution { d, x: p, y: qq, norm_sign: if period % 2 == 1 { -1 } else { 1 }, period };
    debug_assert!(sol.verify());
    Ok(sol)
}

/// `(2, sign of N(ε))` for the real quadratic field `Q(√d)`.
///
/// For squarefree `d` the fundamental unit of the maximal order has an odd
/// power in `Z[√d]`, so its norm equals that of the Pell solution. For other
/// `d` the Pell solution belongs to a smaller order and says nothing about
/// the field.
pub fn quadratic_field_evidence(d: u64) -> Result<(u64, Option<i8>), UnitsError> {
    if d < 2 || !is_squarefree(d) {
        return Err(UnitsError::NotSquarefree(d));
    }
    Ok((2, Some(pell_fundamental(d)?.norm_sign)))
}

/// `[Z^× : N(O_L^×)]` for `L = ∏ K_i` over `Q`, `S = {∞}`.
///
/// Each entry is `([K_i : Q], s_i)` where `s_i = -1` means `-1` is the norm
/// of a unit of `K_i` (for a real quadratic field: the fundamental unit has
/// norm `-1`). The index is 1 as soon as one degree is odd or one `s_i = -1`.
pub fn unit_norm_index_over_q(fields: &[(u64, Option<i8>)]) -> Result<u32, UnitsError> {
    if fields.is_empty() {
        return Err(UnitsError::NoDegrees);
    }
    for &(deg, sign) in fields {
        if deg == 0 {
            return Err(UnitsError::BadDegree(deg));
        }
        if let Some(s) = sign {
            if s != 1 && s != -1 {
                return Err(UnitsError::BadSign(s));
            }
        }
    }
    if fields.iter().any(|&(deg, sign)| deg % 2 == 1 || sign == Some(-1)) {
        return Ok(1);
    }
    let unknown: Vec<usize> = fields.iter().enumerate().filter(|(_, f)| f.1.is_none()).map(|(i, _)| i).collect();
    if unknown.is_empty() {
        Ok(2)
    } else {
        Err(UnitsError::InsufficientData(unknown))
    }
}

pub fn gcd_degree(degrees: &[u64]) -> Result<u64, UnitsError> {
    if degrees.is_empty() {
        return Err(UnitsError::NoDegrees);
    }
    if let Some(&bad) = degrees.iter().find(|&&x| x == 0) {
        return Err(UnitsError::BadDegree(bad));
    }
    Ok(degrees.iter().fold(0, |g, &x| g.gcd(&x)))
}

/// Images of `N(F_L)` in a basis of `F_k ≅ Z^rank`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePartData {
    pub rank: usize,
    pub norm_images: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitIndexInput {
    /// `[μ_k : N(μ_L)]`.
    pub torsion_index: BigUint,
    pub degrees: Vec<u64>,
    pub free_part_data: Option<FreePartData>,
}

/// `F_k / N(F_L) = Z^s / (d Z^s + ⟨norm images⟩)`.
pub fn free_quotient_from_data(degrees: &[u64], data: &FreePartData) -> Result<FiniteAbelianGroup, UnitsError> {
    let d = gcd_degree(degrees)?;
    let s = data.rank;
    if s == 0 {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let mut rows: Vec<Vec<i64>> = (0..s).map(|i| (0..s).map(|j| if i == j { d as i64 } else { 0 }).collect()).collect();
    rows.extend(data.norm_images.iter().cloned());
    let rel = IntMatrix::from_rows(&rows)?;
    Ok(group_from_presentation(s, &rel)?)
}

/// `[μ_k : N(μ_L)] · |F_k / N(F_L)|`.
pub fn unit_norm_index_general(
    inp: &UnitIndexInput,
    free_quotient: &FiniteAbelianGroup,
) -> Result<BigUint, UnitsError> {
    if inp.torsion_index.is_zero() {
        return Err(UnitsError::BadTorsionIndex);
    }
    let d = gcd_degree(&inp.degrees)?;
    if !(BigUint::from(d) % free_quotient.exponent()).is_zero() {
        return Err(UnitsError::FreeQuotientExponent { group: free_quotient.to_string(), d });
    }
    Ok(&inp.torsion_index * free_quotient.order())
}

/// [`unit_norm_index_general`] with the free quotient built from
/// `free_part_data`; without it only `d = 1` is decidable.
pub fn unit_norm_index_from_data(inp: &UnitIndexInput) -> Result<BigUint, UnitsError> {
    let q = match &inp.free_part_data {
        Some(data) => free_quotient_from_data(&inp.degrees, data)?,
        None if gcd_degree(&inp.degrees)? == 1 => FiniteAbelianGroup::trivial(),
        None => return Err(UnitsError::InsufficientData(Vec::new())),
    };
    unit_norm_index_general(inp, &q)
}
