//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

/// All elements of `⟨gens⟩` inside `Z/m_1 × ... × Z/m_k`, by closure.
pub fn closure(moduli: &[u64], gens: &[Vec<i64>]) -> BTreeSet<Vec<u64>> {
    let norm = |v: &[i64]| -> Vec<u64> { v.iter().zip(moduli).map(|(&x, &m)| x.rem_euclid(m as i64) as u64).collect() };
    let gens: Vec<Vec<u64>> = gens.iter().map(|g| norm(g)).collect();
    let zero = vec![0u64; moduli.len()];
    let mut seen = BTreeSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y: Vec<u64> = x.iter().zip(g).zip(moduli).map(|((&a, &b), &m)| (a + b) % m).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// `[G : ⟨∪ subs⟩]` by element counting.
pub fn brute_join_index(moduli: &[u64], subs: &[Vec<Vec<i64>>]) -> u64 {
    let all: Vec<Vec<i64>> = subs.iter().flatten().cloned().collect();
    let order: u64 = moduli.iter().product();
    order / closure(moduli, &all).len() as u64
}

/// `log_p |⟨a⟩ ∩ ⟨b⟩|` in `(Z/q)^2`.
pub fn brute_intersection_exponent(p: u64, q: u64, a: [u64; 2], b: [u64; 2]) -> u32 {
    let span = |v: [u64; 2]| -> BTreeSet<[u64; 2]> { (0..q).map(|t| [t * v[0] % q, t * v[1] % q]).collect() };
    let size = span(a).intersection(&span(b)).count() as u64;
    let (mut e, mut s) = (0, 1);
    while s < size {
        s *= p;
        e += 1;
    }
    assert_eq!(s, size, "intersection order is not a power of p");
    e
}

/// `log_p |∩ ⟨v_i⟩|` in `(Z/q)^2`.
pub fn brute_common_exponent(p: u64, q: u64, vs: &[[u64; 2]]) -> u32 {
    let span = |v: [u64; 2]| -> BTreeSet<[u64; 2]> { (0..q).map(|t| [t * v[0] % q, t * v[1] % q]).collect() };
    let mut acc = span(vs[0]);
    for &v in &vs[1..] {
        acc = acc.intersection(&span(v)).copied().collect();
    }
    let size = acc.len() as u64;
    let (mut e, mut s) = (0, 1);
    while s < size {
        s *= p;
        e += 1;
    }
    e
}

/// Least `(x, y)` with `y <= ymax` and `x^2 - d y^2 = ±1`.
pub fn brute_pell(d: u64, ymax: u64) -> Option<(u64, u64, i8)> {
    (1..=ymax).find_map(|y| {
        let t = (d as u128) * (y as u128) * (y as u128);
        for (sign, v) in [(-1i8, t.checked_sub(1)), (1, Some(t + 1))] {
            if let Some(v) = v {
                let x = (v as f64).sqrt() as u128;
                for c in x.saturating_sub(1)..=x + 1 {
                    if c > 0 && c * c == v {
                        return Some((c as u64, y, sign));
                    }
                }
            }
        }
        None
    })
}

/// Every multiset of cyclic-group orders whose product is at most `max`,
/// as invariant-factor chains `d_1 | d_2 | ...` with `d_1 > 1`.
pub fn groups_up_to(max: u64) -> Vec<Vec<u64>> {
    fn rec(prefix: &mut Vec<u64>, order: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        let last = prefix.last().copied().unwrap_or(1);
        let mut d = if last == 1 { 2 } else { last };
        while order * d <= max {
            if d % last == 0 {
                prefix.push(d);
                rec(prefix, order * d, max, out);
                prefix.pop();
            }
            d += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, max, &mut out);
    out
}
