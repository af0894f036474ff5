//! Univariate polynomials over a prime field `F_p`, coefficients little-endian.

use crate::arith::{inv_mod, mul_mod};

pub type PolyFp = Vec<u64>;

pub fn trim(mut a: PolyFp) -> PolyFp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Reduce integer coefficients modulo `p`.
pub fn from_ints(coeffs: &[i64], p: u64) -> PolyFp {
    trim(coeffs.iter().map(|&c| (c as i128).rem_euclid(p as i128) as u64).collect())
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

pub fn scale(a: &[u64], c: u64, p: u64) -> PolyFp {
    trim(a.iter().map(|&x| mul_mod(x, c, p)).collect())
}

/// Quotient and remainder. `b` must be nonzero.
pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (PolyFp, PolyFp) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = inv_mod(b[db], p).expect("leading coefficient invertible");
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = mul_mod(r[dr], lead_inv, p);
        q[dr - db] = c;
        for j in 0..=db {
            r[dr - db + j] = (r[dr - db + j] + p - mul_mod(c, b[j], p)) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    divrem(a, b, p).1
}

pub fn make_monic(a: &[u64], p: u64) -> PolyFp {
    match degree(a) {
        None => Vec::new(),
        Some(d) => scale(a, inv_mod(a[d], p).unwrap(), p),
    }
}

/// Monic gcd.
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(&a, p)
}

pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> PolyFp {
    rem(&mul(a, b, p), m, p)
}

/// `a^e mod m`.
pub fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> PolyFp {
    let mut base = rem(a, m, p);
    let mut acc = rem(&[1], m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &base, m, p);
        }
        base = mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

pub fn derivative(a: &[u64], p: u64) -> PolyFp {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect(),
    )
}

/// Distinct roots of `f` in `F_p`, ascending.
pub fn roots(f: &[u64], p: u64) -> Vec<u64> {
    let f = trim(f.to_vec());
    if degree(&f).unwrap_or(0) == 0 {
        return Vec::new();
    }
    if p <= 64 {
        return (0..p).filter(|&x| eval(&f, x, p) == 0).collect();
    }
    // product of the distinct linear factors
    let xp = powmod(&[0, 1], p as u128, &f, p);
    let g = gcd(&sub(&xp, &[0, 1], p), &f, p);
    let mut out = Vec::new();
    split_linear(&g, p, &mut out);
    out.sort_unstable();
    out
}

fn split_linear(g: &[u64], p: u64, out: &mut Vec<u64>) {
    match degree(g) {
        None | Some(0) => {}
        Some(1) => {
            let g = make_monic(g, p);
            out.push((p - g[0]) % p);
        }
        Some(_) => {
            let mut shift = 0u64;
            loop {
                let h = powmod(&[shift, 1], ((p - 1) / 2) as u128, g, p);
                let d = gcd(&sub(&h, &[1], p), g, p);
                let dd = degree(&d).unwrap_or(0);
                if dd > 0 && dd < degree(g).unwrap() {
                    let (q, _) = divrem(g, &d, p);
                    split_linear(&d, p, out);
                    split_linear(&q, p, out);
                    return;
                }
                shift += 1;
            }
        }
    }
}

/// Factorisation into monic irreducibles with multiplicities, sorted by
/// (degree, coefficient vector).
pub fn factor(f: &[u64], p: u64) -> Vec<(PolyFp, u32)> {
    let f = make_monic(f, p);
    let deg = degree(&f).unwrap_or(0);
    let mut out = if deg == 0 {
        Vec::new()
    } else if p <= 50 || p as usize <= deg {
        factor_brute(&f, p)
    } else {
        factor_large_p(&f, p)
    };
    out.sort_by(|a, b| (a.0.len(), a.0.iter().rev().collect::<Vec<_>>()).cmp(&(b.0.len(), b.0.iter().rev().collect::<Vec<_>>())));
    out
}

fn monic_polys_of_degree(d: usize, p: u64) -> impl Iterator<Item = PolyFp> {
    let count = p.pow(d as u32);
    (0..count).map(move |mut idx| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push(idx % p);
            idx /= p;
        }
        v.push(1);
        v
    })
}

fn factor_brute(f: &[u64], p: u64) -> Vec<(PolyFp, u32)> {
    let mut rest = f.to_vec();
    let mut out = Vec::new();
    let mut d = 1;
    while degree(&rest).unwrap_or(0) >= 2 * d {
        for cand in monic_polys_of_degree(d, p) {
            let mut mult = 0;
            loop {
                let (q, r) = divrem(&rest, &cand, p);
                if !r.is_empty() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                out.push((cand, mult));
            }
        }
        d += 1;
    }
    if degree(&rest).unwrap_or(0) > 0 {
        let rest = make_monic(&rest, p);
        match out.iter_mut().find(|(g, _)| *g == rest) {
            Some(entry) => entry.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    out
}

fn factor_large_p(f: &[u64], p: u64) -> Vec<(PolyFp, u32)> {
    // p exceeds the degree, so Yun's squarefree decomposition applies.
    let mut out = Vec::new();
    let mut i = 1u32;
    let fd = derivative(f, p);
    let a = gcd(f, &fd, p);
    let mut b = divrem(f, &a, p).0;
    let mut c = divrem(&fd, &a, p).0;
    let mut d = sub(&c, &derivative(&b, p), p);
    loop {
        let g = gcd(&b, &d, p);
        if degree(&b).unwrap_or(0) == 0 {
            break;
        }
        for irr in squarefree_factor(&g, p) {
            out.push((irr, i));
        }
        b = divrem(&b, &g, p).0;
        c = divrem(&d, &g, p).0;
        d = sub(&c, &derivative(&b, p), p);
        i += 1;
    }
    out
}

/// Irreducible factors of a squarefree polynomial (odd `p`).
fn squarefree_factor(f: &[u64], p: u64) -> Vec<PolyFp> {
    let mut out = Vec::new();
    let mut rest = make_monic(f, p);
    let mut h = vec![0, 1];
    let mut d = 1usize;
    while degree(&rest).unwrap_or(0) >= 2 * d {
        h = powmod(&h, p as u128, &rest, p);
        let g = gcd(&sub(&h, &[0, 1], p), &rest, p);
        if degree(&g).unwrap_or(0) > 0 {
            equal_degree_split(&g, d, p, &mut out);
            rest = divrem(&rest, &g, p).0;
            h = rem(&h, &rest, p);
        }
        d += 1;
    }
    if degree(&rest).unwrap_or(0) > 0 {
        out.push(make_monic(&rest, p));
    }
    out
}

fn equal_degree_split(g: &[u64], d: usize, p: u64, out: &mut Vec<PolyFp>) {
    let dg = degree(g).unwrap_or(0);
    if dg == d {
        out.push(make_monic(g, p));
        return;
    }
    let exp = (p as u128).pow(d as u32).saturating_sub(1) / 2;
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ p;
    loop {
        let a: PolyFp = (0..dg)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) % p
            })
            .collect();
        let a = trim(a);
        if degree(&a).unwrap_or(0) == 0 {
            continue;
        }
        let h = powmod(&a, exp, g, p);
        let s = gcd(&sub(&h, &[1], p), g, p);
        let ds = degree(&s).unwrap_or(0);
        if ds > 0 && ds < dg {
            let q = divrem(g, &s, p).0;
            equal_degree_split(&s, d, p, out);
            equal_degree_split(&q, d, p, out);
            return;
        }
    }
}

pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = make_monic(f, p);
    let fac = factor(&f, p);
    fac.len() == 1 && fac[0].1 == 1
}


#[cfg(test)]
mod tests {
    use super::*;

    fn expand(factors: &[(PolyFp, u32)], p: u64) -> PolyFp {
        let mut acc = vec![1];
        for (g, e) in factors {
            for _ in 0..*e {
                acc = mul(&acc, g, p);
            }
        }
        acc
    }

    #[test]
    fn shanks_cubic_roots_mod_13() {
        let f = from_ints(&[-1, -2, 1, 1], 13);
        assert_eq!(roots(&f, 13), vec![7, 8, 10]);
        assert_eq!(roots(&from_ints(&[-1, -2, 1, 1], 2), 2), Vec::<u64>::new());
    }

    #[test]
    fn ramified_factorisation_mod_7() {
        let f = from_ints(&[-1, -2, 1, 1], 7);
        let fac = factor(&f, 7);
        assert_eq!(fac, vec![(vec![5, 1], 3)]);
    }

    #[test]
    fn factorisations_multiply_back() {
        let f = from_ints(&[-1, -2, 1, 1], 2);
        assert!(is_irreducible(&f, 2));
        for &p in &[101u64, 103, 1009, 7919, 3, 5, 11] {
            for coeffs in [
                vec![-1i64, -2, 1, 1],
                vec![6, 11, 6, 1],
                vec![1, 0, 2, 0, 1],
                vec![-4, 0, 0, 0, 0, 1],
                vec![9, -6, 1],
            ] {
                let f = from_ints(&coeffs, p);
                let fac = factor(&f, p);
                assert_eq!(expand(&fac, p), make_monic(&f, p), "p={p} f={coeffs:?}");
                for (g, _) in &fac {
                    assert!(factor(g, p).len() == 1, "factor not irreducible");
                }
            }
        }
    }

    #[test]
    fn large_prime_roots() {
        let p = 1_000_003u64;
        // (x-5)(x-17)(x+1)
        let f = mul(&mul(&from_ints(&[-5, 1], p), &from_ints(&[-17, 1], p), p), &from_ints(&[1, 1], p), p);
        assert_eq!(roots(&f, p), vec![5, 17, p - 1]);
    }
}
