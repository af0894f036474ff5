//! Rational-integer helpers: modular arithmetic, Jacobi symbols, sieving and
//! factorisation.

use std::collections::BTreeMap;

use rayon::prelude::*;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Reduce a signed value into `[0, m)`.
#[inline]
pub fn reduce_i128(v: i128, m: u64) -> u64 {
    v.rem_euclid(m as i128) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u64) -> i8 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus");
    let mut a = reduce_i128(a, n);
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol via Euler's criterion; independent of [`jacobi`].
pub fn legendre_euler(a: i128, p: u64) -> i8 {
    let a = reduce_i128(a, p);
    if a == 0 {
        return 0;
    }
    if p == 2 {
        return 1;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn is_prime(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

/// Factorisation `n = prod p^e` as an ordered map.
pub fn factorize(n: u64) -> BTreeMap<u64, u32> {
    if n <= 1 {
        return BTreeMap::new();
    }
    num_prime::nt_funcs::factorize64(n)
        .into_iter()
        .map(|(p, e)| (p, e as u32))
        .collect()
}

pub fn factorize_u128(n: u128) -> BTreeMap<u128, u32> {
    if n <= 1 {
        return BTreeMap::new();
    }
    num_prime::nt_funcs::factorize128(n)
        .into_iter()
        .map(|(p, e)| (p, e as u32))
        .collect()
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).values().all(|&e| e == 1)
}

/// Every prime factor appears at least squared. `1` is squarefull.
pub fn is_squarefull(n: u64) -> bool {
    factorize(n).values().all(|&e| e >= 2)
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Largest `r` with `r^k <= n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    while r > 0 && (r as u128).pow(k) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128).pow(k) <= n as u128 {
        r += 1;
    }
    r
}

const SIEVE_BLOCK: u64 = 1 << 16;

pub const SIEVE_BUDGET: u64 = 100_000_000;

/// [`primes_up_to`] behind the sieve budget, for user-supplied bounds.
pub fn guarded_primes(limit: u64) -> crate::error::Result<Vec<u64>> {
    if limit > SIEVE_BUDGET {
        return Err(crate::error::Error::CostGuard { what: "prime bound".into(), size: limit, budget: SIEVE_BUDGET });
    }
    Ok(primes_up_to(limit))
}

/// All primes `<= limit`, in ascending order.
///
/// Segmented sieve; segments are processed in parallel and concatenated in
/// order, so the output does not depend on the worker count.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = isqrt(limit);
    let base = simple_sieve(root);
    if limit <= root.max(SIEVE_BLOCK) {
        return simple_sieve(limit);
    }
    let blocks: Vec<u64> = (0..=limit / SIEVE_BLOCK).collect();
    let parts: Vec<Vec<u64>> = blocks
        .par_iter()
        .map(|&b| {
            let lo = b * SIEVE_BLOCK;
            let hi = ((b + 1) * SIEVE_BLOCK - 1).min(limit);
            sieve_segment(lo, hi, &base)
        })
        .collect();
    parts.concat()
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit as usize + 1];
    let mut out = Vec::new();
    for i in 2..=limit as usize {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit as usize {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut j = start;
        while j <= hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    (0..len)
        .filter(|&i| !composite[i] && lo + i as u64 >= 2)
        .map(|i| lo + i as u64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_agrees_with_euler_on_primes() {
        for &p in &[3u64, 5, 7, 11, 13, 101, 7919] {
            for a in -50i128..50 {
                assert_eq!(jacobi(a, p), legendre_euler(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn jacobi_is_multiplicative_in_modulus() {
        for a in -30i128..30 {
            assert_eq!(jacobi(a, 15), jacobi(a, 3) * jacobi(a, 5));
            assert_eq!(jacobi(a, 63), jacobi(a, 7) * jacobi(a, 9));
        }
    }

    #[test]
    fn squares_mod_13() {
        let qr: Vec<i128> = (1..13).filter(|&a| jacobi(a, 13) == 1).collect();
        assert_eq!(qr, vec![1, 3, 4, 9, 10, 12]);
    }

    #[test]
    fn segmented_sieve_matches_trial_division() {
        let ps = primes_up_to(300_000);
        assert_eq!(ps.len(), 25997);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert!(ps.iter().take(2000).all(|&p| is_prime(p)));
        assert_eq!(primes_up_to(10_000).len(), 1229);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn squarefull_examples() {
        assert!(is_squarefull(1));
        assert!(is_squarefull(72));
        assert!(!is_squarefull(12));
        assert!(is_squarefree(30));
        assert!(!is_squarefree(49));
    }

    #[test]
    fn inverse_and_roots() {
        assert_eq!(inv_mod(7, 13), Some(2));
        assert_eq!(inv_mod(6, 9), None);
        assert_eq!(iroot(1_000_000, 3), 100);
        assert_eq!(iroot(999_999, 3), 99);
        assert_eq!(isqrt(48), 6);
    }
}
