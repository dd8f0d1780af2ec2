//! Small machine-word helpers shared by the modules.

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // These bases are sufficient for every n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// p-adic valuation of `x`, with `v_p(0)` reported as `cap`. The result never
/// exceeds `cap`.
pub fn valuation_capped(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while v < cap && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// `p^e`, or `None` on overflow.
pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

/// `true` when no prime square divides `n`. `n = 0` is not squarefree.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut f = 2u64;
    while f.saturating_mul(f) <= m {
        if m.is_multiple_of(f) {
            m /= f;
            if m.is_multiple_of(f) {
                return false;
            }
        }
        f += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_trial_division() {
        let slow = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000 {
            assert_eq!(is_prime(n), slow(n), "n = {n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn valuation_caps() {
        assert_eq!(valuation_capped(0, 3, 3), 3);
        assert_eq!(valuation_capped(54, 3, 3), 3);
        assert_eq!(valuation_capped(54, 3, 2), 2);
        assert_eq!(valuation_capped(10, 3, 5), 0);
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(30));
        assert!(!is_squarefree(20));
        assert!(is_squarefree(1));
        assert!(!is_squarefree(49));
    }
}
