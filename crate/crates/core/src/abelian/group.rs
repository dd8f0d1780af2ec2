use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::matrix::{smith_normal_form, IntMatrix};
use super::AbelianError;
use crate::arith::is_prime;

/// A finite abelian group in invariant-factor form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteAbelianGroup {
    factors: Vec<BigUint>,
    order: BigUint,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self { factors: Vec::new(), order: BigUint::one() }
    }

    /// `Z/n`. `n = 1` gives the trivial group.
    pub fn cyclic(n: impl Into<BigUint>) -> Result<Self, AbelianError> {
        let n = n.into();
        if n.is_zero() {
            return Err(AbelianError::InvalidFactors("Z/0 is not finite".into()));
        }
        Ok(Self::from_chain_unchecked(vec![n]))
    }

    /// Accepts an already canonical chain `d_1 | ... | d_k`, all `d_j ≥ 2`.
    pub fn from_invariant_factors(factors: Vec<BigUint>) -> Result<Self, AbelianError> {
        if let Some(bad) = factors.iter().find(|d| **d < BigUint::from(2u32)) {
            return Err(AbelianError::InvalidFactors(format!("factor {bad} is below 2")));
        }
        if let Some(w) = factors.windows(2).find(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(AbelianError::InvalidFactors(format!("{} does not divide {}", w[0], w[1])));
        }
        let order = factors.iter().product();
        Ok(Self { factors, order })
    }

    /// Canonical form of `Z/n_1 ⊕ ... ⊕ Z/n_k` for arbitrary positive orders.
    pub fn from_cyclic_orders<I>(orders: I) -> Result<Self, AbelianError>
    where
        I: IntoIterator,
        I::Item: Into<BigUint>,
    {
        let orders: Vec<BigUint> = orders.into_iter().map(Into::into).collect();
        if orders.iter().any(Zero::is_zero) {
            return Err(AbelianError::InvalidFactors("Z/0 is not finite".into()));
        }
        Ok(Self::from_chain_unchecked(orders))
    }

    /// Canonicalises a list of positive cyclic orders by repeated
    /// `(a, b) -> (gcd, lcm)`, which preserves the isomorphism class.
    fn from_chain_unchecked(mut orders: Vec<BigUint>) -> Self {
        let k = orders.len();
        for i in 0..k {
            for j in i + 1..k {
                let g = orders[i].gcd(&orders[j]);
                if g != orders[i] {
                    let l = &orders[i] / &g * &orders[j];
                    orders[i] = g;
                    orders[j] = l;
                }
            }
        }
        orders.retain(|d| !d.is_one());
        let order = orders.iter().product();
        Self { factors: orders, order }
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.factors
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Exponent of the group (largest invariant factor).
    pub fn exponent(&self) -> BigUint {
        self.factors.last().cloned().unwrap_or_else(BigUint::one)
    }

    /// Prime-power view: the elementary divisors, sorted by prime then power.
    /// Uses trial division, so it is only meant for orders of moderate size.
    pub fn elementary_divisors(&self) -> Vec<(BigUint, u32)> {
        let mut out = Vec::new();
        for d in &self.factors {
            for (p, e) in factor_trial(d) {
                out.push((p, e));
            }
        }
        out.sort();
        out
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self == other
    }

    /// Factors as machine integers, for reports. `None` if any factor
    /// exceeds `u64`.
    pub fn factors_u64(&self) -> Option<Vec<u64>> {
        self.factors.iter().map(ToPrimitive::to_u64).collect()
    }
}

fn factor_trial(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut f = BigUint::from(2u32);
    while &f * &f <= n {
        let mut e = 0;
        while (&n % &f).is_zero() {
            n /= &f;
            e += 1;
        }
        if e > 0 {
            out.push((f.clone(), e));
        }
        f += 1u32;
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

impl fmt::Display for FiniteAbelianGroup {
    /// `0`, `Z/3`, `(Z/3)^3`, `Z/3 ⊕ Z/9`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.factors.len() {
            let d = &self.factors[i];
            let run = self.factors[i..].iter().take_while(|x| *x == d).count();
            if !first {
                write!(f, " ⊕ ")?;
            }
            first = false;
            if run == 1 {
                write!(f, "Z/{d}")?;
            } else {
                write!(f, "(Z/{d})^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteAbelianGroup({self})")
    }
}

/// Generators of a subgroup, in the coordinates of the ambient group's
/// invariant-factor decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupGens {
    ambient: FiniteAbelianGroup,
    generators: Vec<Vec<BigInt>>,
}

impl SubgroupGens {
    pub fn new(ambient: FiniteAbelianGroup, generators: Vec<Vec<BigInt>>) -> Result<Self, AbelianError> {
        let rank = ambient.rank();
        if let Some(bad) = generators.iter().find(|g| g.len() != rank) {
            return Err(AbelianError::DimensionMismatch(format!(
                "generator of length {} in ambient group of rank {rank}",
                bad.len()
            )));
        }
        Ok(Self { ambient, generators })
    }

    pub fn from_i64(ambient: FiniteAbelianGroup, generators: &[Vec<i64>]) -> Result<Self, AbelianError> {
        Self::new(ambient, generators.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    /// The trivial subgroup.
    pub fn trivial(ambient: FiniteAbelianGroup) -> Self {
        Self { ambient, generators: Vec::new() }
    }

    /// The whole ambient group, generated by its standard basis.
    pub fn full(ambient: FiniteAbelianGroup) -> Self {
        let rank = ambient.rank();
        let generators = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        Self { ambient, generators }
    }

    pub fn ambient(&self) -> &FiniteAbelianGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    /// Order of the generated subgroup.
    pub fn order(&self) -> BigUint {
        let index = join_index(&self.ambient, std::slice::from_ref(self)).expect("coordinates checked at construction");
        self.ambient.order() / index
    }
}

/// The group `Z^rank / ⟨rows of relations⟩`.
pub fn group_from_presentation(rank: usize, relations: &IntMatrix) -> Result<FiniteAbelianGroup, AbelianError> {
    if relations.cols() != rank {
        return Err(AbelianError::DimensionMismatch(format!(
            "relations have {} columns for rank {rank}",
            relations.cols()
        )));
    }
    if rank == 0 {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let diag = smith_normal_form(relations).invariants();
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    if nonzero < rank {
        return Err(AbelianError::InfiniteQuotient { free_rank: rank - nonzero });
    }
    let factors: Vec<BigUint> = diag
        .into_iter()
        .map(|d| d.to_biguint().expect("Smith diagonal is nonnegative"))
        .filter(|d| !d.is_one())
        .collect();
    FiniteAbelianGroup::from_invariant_factors(factors)
}

fn presentation_of(ambient: &FiniteAbelianGroup) -> Vec<Vec<BigInt>> {
    let rank = ambient.rank();
    ambient
        .invariant_factors()
        .iter()
        .enumerate()
        .map(|(i, d)| (0..rank).map(|j| if i == j { BigInt::from(d.clone()) } else { BigInt::zero() }).collect())
        .collect()
}

/// `[ambient : ⟨∪ subs⟩]`. With no subgroups this is `|ambient|`.
pub fn join_index(ambient: &FiniteAbelianGroup, subs: &[SubgroupGens]) -> Result<BigUint, AbelianError> {
    let rank = ambient.rank();
    let mut rows = presentation_of(ambient);
    for s in subs {
        if s.ambient != *ambient {
            return Err(AbelianError::AmbientMismatch);
        }
        for g in &s.generators {
            if g.len() != rank {
                return Err(AbelianError::DimensionMismatch(format!(
                    "generator of length {} in ambient group of rank {rank}",
                    g.len()
                )));
            }
            rows.push(g.clone());
        }
    }
    let relations = IntMatrix::from_big_rows(rank, &rows)?;
    Ok(group_from_presentation(rank, &relations)?.order().clone())
}

/// The p-Sylow subgroup.
pub fn p_primary_part(g: &FiniteAbelianGroup, p: u64) -> Result<FiniteAbelianGroup, AbelianError> {
    if !is_prime(p) {
        return Err(AbelianError::NotPrime(p));
    }
    let p = BigUint::from(p);
    let parts = g.invariant_factors().iter().map(|d| {
        let mut d = d.clone();
        let mut part = BigUint::one();
        while (&d % &p).is_zero() {
            d /= &p;
            part *= &p;
        }
        part
    });
    // p-parts of a divisibility chain form a chain.
    let factors: Vec<BigUint> = parts.filter(|d| !d.is_one()).collect();
    FiniteAbelianGroup::from_invariant_factors(factors)
}

pub fn direct_sum<'a, I>(gs: I) -> FiniteAbelianGroup
where
    I: IntoIterator<Item = &'a FiniteAbelianGroup>,
{
    let orders: Vec<BigUint> = gs.into_iter().flat_map(|g| g.factors.iter().cloned()).collect();
    FiniteAbelianGroup::from_chain_unchecked(orders)
}

/// Orders of the kernel and cokernel of a homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSymbolInput {
    pub kernel_order: BigUint,
    pub cokernel_order: BigUint,
}

impl QSymbolInput {
    pub fn new(kernel_order: impl Into<BigUint>, cokernel_order: impl Into<BigUint>) -> Result<Self, AbelianError> {
        let kernel_order = kernel_order.into();
        let cokernel_order = cokernel_order.into();
        if kernel_order.is_zero() || cokernel_order.is_zero() {
            return Err(AbelianError::InvalidFactors("q-symbol orders must be at least 1".into()));
        }
        Ok(Self { kernel_order, cokernel_order })
    }
}

/// `|coker| / |ker|`.
pub fn q_symbol(q: &QSymbolInput) -> BigRational {
    BigRational::new(BigInt::from(q.cokernel_order.clone()), BigInt::from(q.kernel_order.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(factors: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_cyclic_orders(factors.iter().copied()).unwrap()
    }

    fn factors(g: &FiniteAbelianGroup) -> Vec<u64> {
        g.factors_u64().unwrap()
    }

    #[test]
    fn presentations() {
        let r = IntMatrix::from_rows(&[vec![27i64]]).unwrap();
        assert_eq!(factors(&group_from_presentation(1, &r).unwrap()), vec![27]);

        let r = IntMatrix::from_rows(&[vec![3i64, 0], vec![0, 3]]).unwrap();
        assert_eq!(factors(&group_from_presentation(2, &r).unwrap()), vec![3, 3]);

        // (2,0) and (2,2) already give 2Z x 2Z.
        let r = IntMatrix::from_rows(&[vec![2i64, 0], vec![0, 4], vec![2, 2]]).unwrap();
        let grp = group_from_presentation(2, &r).unwrap();
        assert_eq!(factors(&grp), vec![2, 2]);
        assert_eq!(grp.order(), &BigUint::from(4u32));

        let r = IntMatrix::from_rows(&[vec![2i64, 1], vec![0, 4]]).unwrap();
        assert_eq!(factors(&group_from_presentation(2, &r).unwrap()), vec![8]);
    }

    #[test]
    fn infinite_presentations_are_rejected() {
        let r = IntMatrix::from_rows(&[vec![2i64, 4]]).unwrap();
        assert_eq!(group_from_presentation(2, &r), Err(AbelianError::InfiniteQuotient { free_rank: 1 }));
        let r = IntMatrix::from_rows(&[vec![0i64]]).unwrap();
        assert!(matches!(group_from_presentation(1, &r), Err(AbelianError::InfiniteQuotient { .. })));
        let r = IntMatrix::from_rows(&[vec![1i64, 2]]).unwrap();
        assert!(matches!(group_from_presentation(3, &r), Err(AbelianError::DimensionMismatch(_))));
    }

    #[test]
    fn join_indices() {
        let klein = g(&[2, 2]);
        let h1 = SubgroupGens::from_i64(klein.clone(), &[vec![1, 0]]).unwrap();
        let h2 = SubgroupGens::from_i64(klein.clone(), &[vec![0, 1]]).unwrap();
        assert_eq!(join_index(&klein, &[h1, h2]).unwrap(), BigUint::one());

        assert_eq!(join_index(&g(&[2]), &[]).unwrap(), BigUint::from(2u32));

        let z8 = g(&[8]);
        let four = SubgroupGens::from_i64(z8.clone(), &[vec![4]]).unwrap();
        assert_eq!(join_index(&z8, &[four]).unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn join_index_rejects_bad_coordinates() {
        assert!(SubgroupGens::from_i64(g(&[2, 2]), &[vec![1]]).is_err());
        let other = SubgroupGens::trivial(g(&[4]));
        assert_eq!(join_index(&g(&[2]), &[other]), Err(AbelianError::AmbientMismatch));
    }

    #[test]
    fn primary_parts() {
        let z12 = g(&[12]);
        assert_eq!(factors(&p_primary_part(&z12, 3).unwrap()), vec![3]);
        assert_eq!(factors(&p_primary_part(&z12, 2).unwrap()), vec![4]);
        assert!(p_primary_part(&FiniteAbelianGroup::trivial(), 5).unwrap().is_trivial());
        assert_eq!(p_primary_part(&z12, 4), Err(AbelianError::NotPrime(4)));
    }

    #[test]
    fn direct_sums() {
        let z3 = g(&[3]);
        assert_eq!(factors(&direct_sum([&z3, &z3, &z3])), vec![3, 3, 3]);
        assert_eq!(factors(&direct_sum([&g(&[2]), &g(&[3])])), vec![6]);
        assert!(direct_sum(std::iter::empty()).is_trivial());
        assert_eq!(factors(&g(&[4, 6, 10])), vec![2, 2, 60]);
    }

    #[test]
    fn canonical_form_rules() {
        assert!(FiniteAbelianGroup::from_invariant_factors(vec![2u32.into(), 3u32.into()]).is_err());
        assert!(FiniteAbelianGroup::from_invariant_factors(vec![1u32.into()]).is_err());
        assert!(FiniteAbelianGroup::cyclic(1u32).unwrap().is_trivial());
        assert!(FiniteAbelianGroup::cyclic(0u32).is_err());
        assert_eq!(g(&[2, 3]), g(&[6]));
        assert_ne!(g(&[2, 2]), g(&[4]));
    }

    #[test]
    fn elementary_divisor_view() {
        let e = g(&[6, 36]).elementary_divisors();
        let as_u: Vec<(u64, u32)> = e.into_iter().map(|(p, k)| (p.to_u64().unwrap(), k)).collect();
        assert_eq!(as_u, vec![(2, 1), (2, 2), (3, 1), (3, 2)]);
    }

    #[test]
    fn display() {
        assert_eq!(FiniteAbelianGroup::trivial().to_string(), "0");
        assert_eq!(g(&[3]).to_string(), "Z/3");
        assert_eq!(g(&[3, 3, 3]).to_string(), "(Z/3)^3");
        assert_eq!(g(&[3, 9]).to_string(), "Z/3 ⊕ Z/9");
    }

    #[test]
    fn q_symbols() {
        let q = |k: u32, c: u32| q_symbol(&QSymbolInput::new(k, c).unwrap());
        assert_eq!(q(1, 1), BigRational::one());
        assert_eq!(q(2, 6), BigRational::from_integer(3.into()));
        assert_eq!(q(4, 2), BigRational::new(1.into(), 2.into()));
        assert!(QSymbolInput::new(0u32, 1u32).is_err());
    }

    #[test]
    fn subgroup_order() {
        let z8 = g(&[8]);
        assert_eq!(SubgroupGens::from_i64(z8.clone(), &[vec![6]]).unwrap().order(), BigUint::from(4u32));
        assert_eq!(SubgroupGens::full(z8.clone()).order(), BigUint::from(8u32));
        assert_eq!(SubgroupGens::trivial(z8).order(), BigUint::one());
    }
}
