//! Kummer families over `k = Q(ζ_{p^n})`.
//!
//! With `ℓ1, ℓ2` multiplicatively independent modulo `p^n`-th powers, the
//! subgroup of `k^×/(k^×)^{p^n}` they generate is `(Z/p^n)^2`, and the field
//! `K_i = k((ℓ1^{a_i} ℓ2^{b_i})^{1/p^n})` corresponds to the cyclic submodule
//! `C_i = ⟨(a_i, b_i)⟩`. Degrees and intersections of the fields are orders
//! of these submodules and of their intersections, so everything here is
//! arithmetic on exponent vectors. The independence of `ℓ1, ℓ2` is an
//! assumption the caller acknowledges; it is not verified.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::arith::{checked_pow, is_prime, valuation_capped};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KummerError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("level n must be at least 1")]
    InvalidLevel,
    #[error("p^n = {p}^{n} is too large")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("generating primes must be distinct rational primes, got ({0}, {1})")]
    InvalidPrimePair(u64, u64),
    #[error("family has no fields")]
    EmptyFamily,
    #[error("vector {index}: exponent {value} is outside [0, {modulus})")]
    ExponentOutOfRange { index: usize, value: u64, modulus: u64 },
    #[error("vector {0} is zero modulo p^n")]
    ZeroVector(usize),
    #[error("vectors {0} and {1} generate the same field")]
    DuplicateField(usize, usize),
    #[error("the fields share a common subfield of degree p^{0} over k")]
    CommonIntersectionNotTrivial(u32),
    #[error("field {index}: declared degree exponent {declared}, computed {computed}")]
    DegreeMismatch { index: usize, declared: u32, computed: u32 },
    #[error("declared {declared} degree exponents for {fields} fields")]
    DeclaredLengthMismatch { declared: usize, fields: usize },
    #[error("field index {index} out of range for {len} fields")]
    IndexOutOfRange { index: usize, len: usize },
}

/// `L = K_0 × ... × K_m` with `K_i` cut out by the exponent pair `(a_i, b_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerFamily {
    pub p: u64,
    pub n: u32,
    pub base_label: String,
    pub prime_pair: (u64, u64),
    pub vectors: Vec<[u64; 2]>,
    /// Optional user-declared `ε_i`; checked against the computed value.
    pub declared_exponents: Option<Vec<u32>>,
    /// The caller vouches that `ℓ1, ℓ2` are independent modulo `p^n`-th powers.
    pub independence_acknowledged: bool,
}

impl KummerFamily {
    pub fn new(p: u64, n: u32, prime_pair: (u64, u64), vectors: Vec<[u64; 2]>) -> Self {
        Self {
            p,
            n,
            base_label: format!("Q(zeta_{})", p.pow(n)),
            prime_pair,
            vectors,
            declared_exponents: None,
            independence_acknowledged: false,
        }
    }

    /// `p^n`. Call [`KummerFamily::check_structure`] first if `p^n` may
    /// overflow.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.n)
    }

    /// Number of fields `m + 1`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Shape checks that do not look at the field lattice.
    pub fn check_structure(&self) -> Result<(), KummerError> {
        if !is_prime(self.p) {
            return Err(KummerError::NotPrime(self.p));
        }
        if self.n == 0 {
            return Err(KummerError::InvalidLevel);
        }
        // keep determinants of reduced vectors inside i128
        match checked_pow(self.p, self.n) {
            Some(q) if q <= 1 << 40 => {}
            _ => return Err(KummerError::ModulusTooLarge { p: self.p, n: self.n }),
        }
        let (l1, l2) = self.prime_pair;
        if l1 == l2 || !is_prime(l1) || !is_prime(l2) {
            return Err(KummerError::InvalidPrimePair(l1, l2));
        }
        if self.vectors.is_empty() {
            return Err(KummerError::EmptyFamily);
        }
        let q = self.modulus();
        for (index, v) in self.vectors.iter().enumerate() {
            if let Some(&value) = v.iter().find(|&&x| x >= q) {
                return Err(KummerError::ExponentOutOfRange { index, value, modulus: q });
            }
        }
        if let Some(declared) = &self.declared_exponents {
            if declared.len() != self.vectors.len() {
                return Err(KummerError::DeclaredLengthMismatch {
                    declared: declared.len(),
                    fields: self.vectors.len(),
                });
            }
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<(), KummerError> {
        if i >= self.vectors.len() {
            return Err(KummerError::IndexOutOfRange { index: i, len: self.vectors.len() });
        }
        Ok(())
    }

    /// Reorders fields: `new[k] = old[perm[k]]`.
    fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        out.vectors = perm.iter().map(|&i| self.vectors[i]).collect();
        if let Some(d) = &self.declared_exponents {
            out.declared_exponents = Some(perm.iter().map(|&i| d[i]).collect());
        }
        out
    }
}

/// `ε_i` with `[K_i : k] = p^{ε_i}`: the order exponent of `(a_i, b_i)`.
pub fn field_degree_exponent(f: &KummerFamily, i: usize) -> Result<u32, KummerError> {
    f.check_index(i)?;
    Ok(epsilon(f.p, f.n, f.vectors[i]))
}

fn epsilon(p: u64, n: u32, v: [u64; 2]) -> u32 {
    let q = p.pow(n);
    let c = valuation_capped(v[0] % q, p, n).min(valuation_capped(v[1] % q, p, n));
    n - c
}

/// `e_{i,j}` with `p^{e_{i,j}} = [K_i ∩ K_j : k] = |C_i ∩ C_j|`.
///
/// Writing `v_i = p^{n-ε_i} u_i` with `u_i` primitive, a multiple `p^s v_i`
/// lies in `C_j` exactly when `det(u_j, p^s v_i) ≡ 0 (mod p^n)` and its
/// valuation reaches `n - ε_j`. Solving for the least `s` gives
/// `e_{i,j} = min(ε_i, ε_j, v_p(det(u_i, u_j)))`.
pub fn intersection_exponent(f: &KummerFamily, i: usize, j: usize) -> Result<u32, KummerError> {
    f.check_index(i)?;
    f.check_index(j)?;
    Ok(pair_exponent(f.p, f.n, f.vectors[i], f.vectors[j]))
}

fn pair_exponent(p: u64, n: u32, vi: [u64; 2], vj: [u64; 2]) -> u32 {
    let ei = epsilon(p, n, vi);
    let ej = epsilon(p, n, vj);
    let cap = ei.min(ej);
    if cap == 0 {
        return 0;
    }
    let q = p.pow(n);
    let scale = |v: [u64; 2], e: u32| {
        let s = p.pow(n - e);
        [(v[0] % q / s) as i128, (v[1] % q / s) as i128]
    };
    let ui = scale(vi, ei);
    let uj = scale(vj, ej);
    let det = ui[0] * uj[1] - ui[1] * uj[0];
    let m = p.pow(cap) as i128;
    let det = det.rem_euclid(m) as u64;
    valuation_capped(det, p, cap)
}

/// `log_p |∩_i C_i|`, so that `[L_ab : k] = p^{value}` for a Kummer family.
///
/// Subgroups of the cyclic group `C_0` form a chain, so the common
/// intersection is the smallest of the `C_0 ∩ C_j`.
pub fn common_intersection_exponent(f: &KummerFamily) -> u32 {
    let Some(&v0) = f.vectors.first() else {
        return 0;
    };
    f.vectors[1..].iter().map(|&vj| pair_exponent(f.p, f.n, v0, vj)).min().unwrap_or_else(|| epsilon(f.p, f.n, v0))
}

/// A validated family reindexed into the canonical order, together with the
/// permutation that produced it: `family.vectors[k] = original[permutation[k]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedFamily {
    pub family: KummerFamily,
    pub permutation: Vec<usize>,
}

/// Checks the family and reorders it so that index 0 has minimal degree and
/// the remaining fields have non-increasing `e_i = ε_0 - e_{0,i}`.
///
/// Ties are broken by input order, both for the choice of index 0 and among
/// equal `e_i`.
pub fn validate_and_normalize(f: &KummerFamily) -> Result<NormalizedFamily, KummerError> {
    f.check_structure()?;
    let eps: Vec<u32> = f.vectors.iter().map(|&v| epsilon(f.p, f.n, v)).collect();
    if let Some(i) = eps.iter().position(|&e| e == 0) {
        return Err(KummerError::ZeroVector(i));
    }
    if let Some(declared) = &f.declared_exponents {
        for (index, (&d, &c)) in declared.iter().zip(&eps).enumerate() {
            if d != c {
                return Err(KummerError::DegreeMismatch { index, declared: d, computed: c });
            }
        }
    }
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let e = pair_exponent(f.p, f.n, f.vectors[i], f.vectors[j]);
            if e == eps[i] && e == eps[j] {
                return Err(KummerError::DuplicateField(i, j));
            }
        }
    }
    let common = common_intersection_exponent(f);
    if common > 0 {
        return Err(KummerError::CommonIntersectionNotTrivial(common));
    }

    let min_eps = *eps.iter().min().expect("nonempty");
    let first = eps.iter().position(|&e| e == min_eps).expect("minimum exists");
    let v0 = f.vectors[first];
    let mut rest: Vec<usize> = (0..f.len()).filter(|&i| i != first).collect();
    // descending e_i is ascending e_{0,i}; sort_by_key is stable
    rest.sort_by_key(|&i| pair_exponent(f.p, f.n, v0, f.vectors[i]));
    let mut permutation = vec![first];
    permutation.extend(rest);
    Ok(NormalizedFamily { family: f.permuted(&permutation), permutation })
}

/// One class of the `l`-equivalence relation on some `U_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// Sorted field indices.
    pub members: Vec<usize>,
    /// `L(c) = min e_{i,j}` over `i, j ∈ c` (including `i = j`).
    pub level: u32,
    /// `n_{l+1}(c)`: how many classes `c` splits into at threshold `l + 1`.
    pub refinement_count: usize,
}

impl EquivalenceClass {
    pub fn representative(&self) -> usize {
        self.members[0]
    }
}

/// The partition of `U_r` at one threshold `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub l: u32,
    pub classes: Vec<EquivalenceClass>,
}

/// Intersection combinatorics of a family, relative to its index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceStructure {
    pub p: u64,
    pub n: u32,
    /// `ε_i` for every field.
    pub epsilon: Vec<u32>,
    /// Symmetric, with `e_{i,i} = ε_i`.
    pub e_matrix: Vec<Vec<u32>>,
    /// `U_r = {i ≥ 1 : e_{0,i} = r}` for every `0 ≤ r ≤ ε_0`, possibly empty.
    pub u_partition: BTreeMap<u32, Vec<usize>>,
    /// `R = {r : U_r ≠ ∅}`, ascending.
    pub r_set: Vec<u32>,
    /// For each `r ∈ R`, the layers `l = L(U_r), ..., n`.
    pub layers: BTreeMap<u32, Vec<Layer>>,
    /// `(r, l)` pairs where the raw relation `e_{i,j} ≥ l` is not transitive
    /// on `U_r`, so the classes come from its transitive closure.
    pub non_transitive: Vec<(u32, u32)>,
}

impl EquivalenceStructure {
    /// `L(c)`; `c` must be nonempty.
    pub fn level(&self, c: &[usize]) -> u32 {
        c.iter()
            .flat_map(|&i| c.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.e_matrix[i][j])
            .min()
            .expect("level of an empty set")
    }

    /// Classes of `set` under the transitive closure of `e_{i,j} ≥ l`,
    /// each sorted, ordered by smallest member.
    pub fn classes_at(&self, set: &[usize], l: u32) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..set.len()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut x = x;
            while parent[x] != r {
                let next = parent[x];
                parent[x] = r;
                x = next;
            }
            r
        }
        for (a, &member) in set.iter().enumerate() {
            for (b, &other) in set.iter().enumerate().skip(a + 1) {
                if self.e_matrix[member][other] >= l {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (a, &member) in set.iter().enumerate() {
            let root = find(&mut parent, a);
            groups.entry(root).or_default().push(member);
        }
        let mut out: Vec<Vec<usize>> = groups
            .into_values()
            .map(|mut g| {
                g.sort_unstable();
                g
            })
            .collect();
        out.sort();
        out
    }

    /// `n_l(c)`.
    pub fn class_count(&self, c: &[usize], l: u32) -> usize {
        self.classes_at(c, l).len()
    }

    pub fn u(&self, r: u32) -> &[usize] {
        self.u_partition.get(&r).map_or(&[], Vec::as_slice)
    }
}

/// Builds the full equivalence structure of `f` with its index 0 as the
/// distinguished field. `f` is expected to be normalized; only the shape
/// checks are repeated here, so a single-field family is allowed.
#[allow(clippy::needless_range_loop)]
pub fn equivalence_structure(f: &KummerFamily) -> Result<EquivalenceStructure, KummerError> {
    f.check_structure()?;
    let len = f.len();
    let epsilon: Vec<u32> = f.vectors.iter().map(|&v| self::epsilon(f.p, f.n, v)).collect();
    let mut e_matrix = vec![vec![0; len]; len];
    for i in 0..len {
        e_matrix[i][i] = epsilon[i];
        for j in i + 1..len {
            let e = pair_exponent(f.p, f.n, f.vectors[i], f.vectors[j]);
            e_matrix[i][j] = e;
            e_matrix[j][i] = e;
        }
    }
    let eps0 = epsilon[0];
    let mut u_partition: BTreeMap<u32, Vec<usize>> = (0..=eps0).map(|r| (r, Vec::new())).collect();
    for i in 1..len {
        u_partition.entry(e_matrix[0][i]).or_default().push(i);
    }
    let r_set: Vec<u32> = u_partition.iter().filter(|(_, u)| !u.is_empty()).map(|(&r, _)| r).collect();

    let mut st = EquivalenceStructure {
        p: f.p,
        n: f.n,
        epsilon,
        e_matrix,
        u_partition,
        r_set,
        layers: BTreeMap::new(),
        non_transitive: Vec::new(),
    };
    let mut layers = BTreeMap::new();
    for &r in &st.r_set {
        let u = st.u(r).to_vec();
        let start = st.level(&u);
        let mut rs = Vec::new();
        for l in start..=f.n {
            let mut classes = Vec::new();
            for members in st.classes_at(&u, l) {
                let raw_ok = members.iter().all(|&i| members.iter().all(|&j| i == j || st.e_matrix[i][j] >= l));
                if !raw_ok {
                    st.non_transitive.push((r, l));
                }
                let level = st.level(&members);
                let refinement_count = st.class_count(&members, l + 1);
                classes.push(EquivalenceClass { members, level, refinement_count });
            }
            rs.push(Layer { l, classes });
        }
        layers.insert(r, rs);
    }
    st.non_transitive.dedup();
    st.layers = layers;
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example_48() -> KummerFamily {
        KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [1, 1], [2, 3], [3, 5], [5, 11]])
    }

    pub(crate) fn example_49() -> KummerFamily {
        KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [1, 1], [2, 3], [4, 9], [10, 19]])
    }

    /// `⟨v⟩ ⊂ (Z/q)^2` as an explicit element set.
    fn span(v: [u64; 2], q: u64) -> std::collections::BTreeSet<[u64; 2]> {
        (0..q).map(|t| [t * v[0] % q, t * v[1] % q]).collect()
    }

    fn oracle_exponent(p: u64, q: u64, a: [u64; 2], b: [u64; 2]) -> u32 {
        let size = span(a, q).intersection(&span(b, q)).count() as u64;
        let mut e = 0;
        let mut s = 1;
        while s < size {
            s *= p;
            e += 1;
        }
        assert_eq!(s, size);
        e
    }

    #[test]
    fn degree_exponents() {
        let f = KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [3, 3], [9, 0]]);
        assert_eq!(field_degree_exponent(&f, 0).unwrap(), 3);
        assert_eq!(field_degree_exponent(&f, 1).unwrap(), 2);
        assert_eq!(field_degree_exponent(&f, 2).unwrap(), 1);
        assert_eq!(span([9, 0], 27).len(), 3);
        assert!(matches!(field_degree_exponent(&f, 3), Err(KummerError::IndexOutOfRange { .. })));
        for i in 0..5 {
            assert_eq!(field_degree_exponent(&example_48(), i).unwrap(), 3);
        }
    }

    #[test]
    fn intersection_examples_match_oracle() {
        let f = example_48();
        assert_eq!(oracle_exponent(3, 27, [1, 0], [1, 1]), 0);
        assert_eq!(intersection_exponent(&f, 0, 1).unwrap(), 0);
        let g = example_49();
        assert_eq!(oracle_exponent(3, 27, [1, 0], [4, 9]), 2);
        assert_eq!(intersection_exponent(&g, 0, 3).unwrap(), 2);
        for i in 0..5 {
            assert_eq!(intersection_exponent(&g, i, i).unwrap(), field_degree_exponent(&g, i).unwrap());
            for j in 0..5 {
                let expect = oracle_exponent(3, 27, g.vectors[i], g.vectors[j]);
                assert_eq!(intersection_exponent(&g, i, j).unwrap(), expect, "({i},{j})");
            }
        }
    }

    #[test]
    fn common_intersections() {
        assert_eq!(common_intersection_exponent(&example_48()), 0);
        let single = KummerFamily::new(3, 3, (5, 19), vec![[1, 0]]);
        assert_eq!(common_intersection_exponent(&single), 3);
        let dup = KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [2, 0]]);
        assert_eq!(common_intersection_exponent(&dup), 3);
        assert_eq!(validate_and_normalize(&dup), Err(KummerError::DuplicateField(0, 1)));
    }

    #[test]
    fn normalization_of_examples() {
        // e_{0,i} for (1,1), (2,3), (3,5), (5,11) is 0, 1, 0, 0.
        let n48 = validate_and_normalize(&example_48()).unwrap();
        assert_eq!(n48.permutation, vec![0, 1, 3, 4, 2]);
        assert_eq!(n48.family.vectors[0], [1, 0]);

        // e_{0,i} for (1,1), (2,3), (4,9), (10,19) is 0, 1, 2, 0.
        let n49 = validate_and_normalize(&example_49()).unwrap();
        assert_eq!(n49.permutation, vec![0, 1, 4, 2, 3]);
        assert_eq!(n49.family.vectors, vec![[1, 0], [1, 1], [10, 19], [2, 3], [4, 9]]);
    }

    #[test]
    fn normalization_is_idempotent() {
        for f in [example_48(), example_49()] {
            let once = validate_and_normalize(&f).unwrap();
            let twice = validate_and_normalize(&once.family).unwrap();
            assert_eq!(twice.family, once.family);
            assert_eq!(twice.permutation, (0..f.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn minimal_degree_field_moves_to_front() {
        let f = KummerFamily::new(3, 2, (2, 5), vec![[1, 0], [3, 0], [0, 1]]);
        // ⟨(3,0)⟩ ⊂ ⟨(1,0)⟩ shares a degree-3 subfield with K_0 but intersects
        // ⟨(0,1)⟩ trivially, so the whole family is still admissible.
        let n = validate_and_normalize(&f).unwrap();
        assert_eq!(n.family.vectors[0], [3, 0]);
        assert_eq!(n.permutation, vec![1, 2, 0]);
    }

    #[test]
    fn validation_errors() {
        let mut f = KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [1, 0]]);
        assert_eq!(validate_and_normalize(&f), Err(KummerError::DuplicateField(0, 1)));
        f.vectors = vec![[1, 0], [0, 0]];
        assert_eq!(validate_and_normalize(&f), Err(KummerError::ZeroVector(1)));
        f.vectors = vec![[1, 0], [27, 1]];
        assert!(matches!(validate_and_normalize(&f), Err(KummerError::ExponentOutOfRange { .. })));
        f.vectors = vec![[1, 0], [1, 9]];
        assert_eq!(validate_and_normalize(&f), Err(KummerError::CommonIntersectionNotTrivial(2)));
        f.vectors = vec![[1, 0], [0, 1]];
        f.declared_exponents = Some(vec![3, 2]);
        assert!(matches!(validate_and_normalize(&f), Err(KummerError::DegreeMismatch { index: 1, .. })));
        f.declared_exponents = Some(vec![3]);
        assert!(matches!(validate_and_normalize(&f), Err(KummerError::DeclaredLengthMismatch { .. })));
        f.declared_exponents = None;
        f.p = 4;
        assert_eq!(validate_and_normalize(&f), Err(KummerError::NotPrime(4)));
        f.p = 3;
        f.prime_pair = (5, 5);
        assert!(matches!(validate_and_normalize(&f), Err(KummerError::InvalidPrimePair(..))));
        f.prime_pair = (5, 19);
        f.vectors.clear();
        assert_eq!(validate_and_normalize(&f), Err(KummerError::EmptyFamily));
    }

    #[test]
    fn structure_of_example_48() {
        // (2,3) meets (1,0) in ⟨(9,0)⟩ and (5,11) meets (1,1) in ⟨(9,9)⟩;
        // every other pair is disjoint.
        let f = example_48();
        assert_eq!(oracle_exponent(3, 27, [1, 0], [2, 3]), 1);
        assert_eq!(oracle_exponent(3, 27, [1, 1], [5, 11]), 1);
        let st = equivalence_structure(&f).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(st.e_matrix[i][j], oracle_exponent(3, 27, f.vectors[i], f.vectors[j]));
            }
        }
        assert_eq!(st.r_set, vec![0, 1]);
        assert_eq!(st.u(0), &[1, 3, 4]);
        assert_eq!(st.u(1), &[2]);
        let layers = &st.layers[&0];
        assert_eq!(layers.iter().map(|l| l.l).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(layers[0].classes.len(), 1);
        assert_eq!(layers[0].classes[0].refinement_count, 2);
        assert_eq!(layers[1].classes.iter().map(|c| c.members.clone()).collect::<Vec<_>>(), vec![vec![1, 4], vec![3]]);
        assert_eq!(layers[1].classes[0].level, 1);
        assert_eq!(layers[1].classes[0].refinement_count, 2);
        assert_eq!(st.class_count(st.u(0), 2), 3);
        assert!(st.non_transitive.is_empty());
    }

    #[test]
    fn structure_of_example_49() {
        let n = validate_and_normalize(&example_49()).unwrap();
        let st = equivalence_structure(&n.family).unwrap();
        assert_eq!(st.r_set, vec![0, 1, 2]);
        assert_eq!(st.u(0), &[1, 2]);
        assert_eq!(st.u(1), &[3]);
        assert_eq!(st.u(2), &[4]);
        assert_eq!(st.level(st.u(0)), 2);
        let l0 = &st.layers[&0];
        assert_eq!(l0.iter().map(|l| l.l).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(l0[0].classes[0].refinement_count, 2);
    }

    #[test]
    fn singleton_and_degenerate_structures() {
        let f = KummerFamily::new(3, 3, (5, 19), vec![[1, 0], [3, 1]]);
        let st = equivalence_structure(&f).unwrap();
        assert_eq!(st.u(0), &[1]);
        assert_eq!(st.level(&[1]), 3);
        for layer in &st.layers[&0] {
            assert_eq!(layer.classes.len(), 1);
        }

        let single = KummerFamily::new(3, 3, (5, 19), vec![[1, 0]]);
        let st = equivalence_structure(&single).unwrap();
        assert!(st.r_set.is_empty());
        assert!(st.u_partition.values().all(Vec::is_empty));
        assert!(st.layers.is_empty());
    }
}
