//! Quadratic residue symbols in `K`, the reciprocity factors `μ`, `μ₂`, `μ_∞`,
//! completed and bracket symbols, and the rational characters `χ_𝔮`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::{self, jacobi};
use crate::error::{Error, Result};
use crate::field::{Element, FieldContext};
use crate::ideals::{self, IdealFactorization, PrimeIdealData};
use crate::lattice;
use crate::polymod;
use crate::IntElement;

/// `(e / 𝔭)` for an odd prime ideal.
pub fn prime_symbol(ctx: &FieldContext, e: &IntElement, q: &PrimeIdealData) -> i8 {
    let p = q.p;
    if q.root.is_some() {
        return jacobi(ideals::residue_of(e, q) as i128, p);
    }
    // residue field F_p[x]/(f̄) for an inert prime
    let fbar = polymod::from_ints(&ctx.defining_poly, p);
    let ebar: Vec<u64> = polymod::trim(e.coords.iter().map(|&c| arith::reduce_i128(c, p)).collect());
    if ebar.is_empty() {
        return 0;
    }
    let exp = ((p as u128).pow(q.degree) - 1) / 2;
    let r = polymod::powmod(&ebar, exp, &fbar, p);
    if r == vec![1] {
        1
    } else if r == vec![p - 1] {
        -1
    } else {
        0
    }
}

/// `(e / 𝔟)` for an odd ideal given by its factorisation.
pub fn residue_symbol(ctx: &FieldContext, e: &IntElement, b: &IdealFactorization) -> Result<i8> {
    if !b.is_odd() {
        return Err(Error::EvenModulus);
    }
    let mut acc = 1i8;
    for (q, k) in &b.factors {
        let s = prime_symbol(ctx, e, q);
        if s == 0 {
            return Ok(0);
        }
        if k % 2 == 1 {
            acc *= s;
        }
    }
    Ok(acc)
}

/// `(a / b)` with the principal ideal `(b)` as lower entry.
pub fn element_symbol(ctx: &FieldContext, a: &IntElement, b: &IntElement) -> Result<i8> {
    let fb = ideals::factor_element(ctx, b)?;
    residue_symbol(ctx, a, &fb)
}

pub fn is_odd_element(ctx: &FieldContext, a: &IntElement) -> bool {
    let n = ctx.norm(&a.convert::<BigInt>().unwrap());
    n.is_odd()
}

/// `μ_∞(a, b) = ∏_k (−1 if a^{(k)} < 0 and b^{(k)} < 0)`.
pub fn mu_infty(ctx: &FieldContext, a: &IntElement, b: &IntElement) -> Result<i8> {
    let sa = ctx.sign_vector(a)?;
    let sb = ctx.sign_vector(b)?;
    Ok(sa.iter().zip(&sb).fold(1, |acc, (x, y)| if *x < 0 && *y < 0 { -acc } else { acc }))
}

/// `(μ, μ₂)` for odd coprime `a, b`: `μ = (a/b)(b/a)` and `μ = μ₂ μ_∞`.
pub fn mu_and_mu2(ctx: &FieldContext, a: &IntElement, b: &IntElement) -> Result<(i8, i8)> {
    if !is_odd_element(ctx, a) || !is_odd_element(ctx, b) {
        return Err(Error::EvenEntry);
    }
    let ab = element_symbol(ctx, a, b)?;
    let ba = element_symbol(ctx, b, a)?;
    if ab == 0 || ba == 0 {
        return Err(Error::NotCoprime);
    }
    let mu = ab * ba;
    Ok((mu, mu * mu_infty(ctx, a, b)?))
}

/// `|a / b| = μ_∞(a, b) (a / b)`; `b` odd, `a` arbitrary nonzero.
pub fn completed_symbol(ctx: &FieldContext, a: &IntElement, b: &IntElement) -> Result<i8> {
    if !is_odd_element(ctx, b) {
        return Err(Error::EvenModulus);
    }
    Ok(mu_infty(ctx, a, b)? * element_symbol(ctx, a, b)?)
}

/// `[a / b] = μ₂(a, b) |a / b|` for odd coprime `a, b`, through reciprocity.
/// An even upper entry is handled by [`bracket_symbol_odd_part`].
pub fn bracket_symbol(ctx: &FieldContext, a: &IntElement, b: &IntElement) -> Result<i8> {
    if !is_odd_element(ctx, a) {
        return bracket_symbol_odd_part(ctx, a, b);
    }
    let (_, mu2) = mu_and_mu2(ctx, a, b)?;
    Ok(mu2 * completed_symbol(ctx, a, b)?)
}

/// `[a / b] = μ(a, b)(a / b)` evaluated with Hilbert reciprocity: the product
/// of `(a, b)_𝔭` over `𝔭 | 2∞` equals the product over odd `𝔭`, where the tame
/// symbols give `(a/b)` times `(b / 𝔞)`, `𝔞` the odd part of `(a)`. Hence
/// `[a / b] = (b / 𝔞)`, valid for any nonzero `a` and odd `b` coprime to `a`.
pub fn bracket_symbol_odd_part(ctx: &FieldContext, a: &IntElement, b: &IntElement) -> Result<i8> {
    if !is_odd_element(ctx, b) {
        return Err(Error::EvenModulus);
    }
    let fa = ideals::factor_element(ctx, a)?;
    let odd = fa.factors.iter().filter(|(q, _)| q.is_odd()).fold(IdealFactorization::unit(), |acc, (q, k)| {
        acc.mul(&IdealFactorization::prime_power(q, *k))
    });
    let s = residue_symbol(ctx, b, &odd)?;
    if s == 0 {
        return Err(Error::NotCoprime);
    }
    Ok(s)
}

/// Values of `μ₂` collected by `(a mod 8, b mod 8)` cell.
#[derive(Debug, Clone, Default)]
pub struct Mu2Table {
    pub cells: BTreeMap<(Vec<i128>, Vec<i128>), i8>,
    pub samples: usize,
    pub conflicts: usize,
}

impl Mu2Table {
    /// Record one pair; returns `false` when it contradicts an earlier sample
    /// in the same cell.
    pub fn insert(&mut self, ctx: &FieldContext, a: &IntElement, b: &IntElement) -> Result<bool> {
        let (_, mu2) = mu_and_mu2(ctx, a, b)?;
        let key = (a.reduce_mod(8).coords, b.reduce_mod(8).coords);
        self.samples += 1;
        match self.cells.get(&key) {
            Some(&v) if v != mu2 => {
                self.conflicts += 1;
                Ok(false)
            }
            Some(_) => Ok(true),
            None => {
                self.cells.insert(key, mu2);
                Ok(true)
            }
        }
    }

    pub fn get(&self, a: &IntElement, b: &IntElement) -> Option<i8> {
        self.cells.get(&(a.reduce_mod(8).coords, b.reduce_mod(8).coords)).copied()
    }

    pub fn is_single_valued(&self) -> bool {
        self.conflicts == 0
    }
}

/// The real character `χ_𝔮(ℓ) = (ℓ / 𝔮)` on rational integers, tabulated over
/// one period `q = N𝔮`.
#[derive(Debug, Clone)]
pub struct DirichletChar {
    pub modulus: u64,
    pub table: Vec<i8>,
}

impl DirichletChar {
    pub fn eval(&self, l: i64) -> i8 {
        self.table[l.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn is_principal(&self) -> bool {
        self.table.iter().all(|&v| v >= 0)
    }
}

/// `χ_𝔮`. For rational `ℓ` and a prime of degree `f` above `p`,
/// `(ℓ/𝔭) = (ℓ/p)^f`, so the table needs only Legendre symbols.
pub fn dirichlet_char(q: &IdealFactorization) -> Result<DirichletChar> {
    if !q.is_odd() {
        return Err(Error::EvenModulus);
    }
    let modulus = q.norm.to_u64().ok_or(Error::CostGuard {
        what: "character modulus".into(),
        size: u64::MAX,
        budget: u64::MAX,
    })?;
    if modulus > 100_000_000 {
        return Err(Error::CostGuard { what: "character modulus".into(), size: modulus, budget: 100_000_000 });
    }
    // exponent parity per rational prime
    let mut parity: BTreeMap<u64, u32> = BTreeMap::new();
    let mut divisors: Vec<u64> = Vec::new();
    for (pr, e) in &q.factors {
        *parity.entry(pr.p).or_insert(0) += pr.degree * e;
        divisors.push(pr.p);
    }
    divisors.sort_unstable();
    divisors.dedup();
    let table = (0..modulus)
        .map(|l| {
            let mut acc = 1i8;
            for (&p, &par) in &parity {
                let s = jacobi(l as i128, p);
                if s == 0 {
                    return 0;
                }
                if par % 2 == 1 {
                    acc *= s;
                }
            }
            acc
        })
        .collect();
    Ok(DirichletChar { modulus, table })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompleteSumMode {
    /// `Σ_{α mod 𝔮} (α/𝔮)` with `𝔮` not a square.
    Plain,
    /// `Σ_{α mod 𝔮'𝔮⁻} (α/𝔮'𝔮⁻)` with some unramified `p` exactly dividing `N𝔮`.
    ConjugatePair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteSumReport {
    pub sum: i64,
    pub modulus_norm: u128,
    /// Whether the hypothesis under which the sum vanishes holds.
    pub hypothesis_holds: bool,
}

pub const COMPLETE_SUM_BUDGET: u64 = 10_000;

/// Exact complete residue-symbol sum over `O/𝔪`, enumerated through the
/// canonical residues of the HNF basis.
pub fn complete_sum_check(ctx: &FieldContext, q: &IdealFactorization, mode: CompleteSumMode) -> Result<CompleteSumReport> {
    if !q.is_odd() {
        return Err(Error::EvenModulus);
    }
    let (m, hyp) = match mode {
        CompleteSumMode::Plain => (q.clone(), q.factors.iter().any(|(_, e)| e % 2 == 1)),
        CompleteSumMode::ConjugatePair => {
            let qa = ideals::conjugate_ideal(ctx, q, 1)?;
            let qb = ideals::conjugate_ideal(ctx, q, ctx.degree - 1)?;
            // a rational prime p exactly dividing N𝔮 must be unramified, since
            // the argument needs 𝔭′ ≠ 𝔭⁻ for the prime 𝔭 | 𝔮 above p
            let hyp = q.factors.iter().any(|(pr, e)| {
                *e == 1 && pr.is_split() && q.factors.iter().filter(|(o, _)| o.p == pr.p).count() == 1
            });
            (qa.mul(&qb), hyp)
        }
    };
    if m.norm > COMPLETE_SUM_BUDGET as u128 {
        return Err(Error::CostGuard {
            what: "complete sum modulus norm".into(),
            size: m.norm.min(u64::MAX as u128) as u64,
            budget: COMPLETE_SUM_BUDGET,
        });
    }
    let h = ideals::ideal_hnf(ctx, &m)?;
    let n = ctx.degree;
    let mut sum = 0i64;
    let bounds: Vec<i128> = (0..n).map(|i| h[i][i]).collect();
    let mut coords = vec![0i128; n];
    loop {
        sum += residue_symbol(ctx, &Element::new(coords.clone()), &m)? as i64;
        // odometer over the residue box
        let mut i = 0;
        loop {
            if i == n {
                debug_assert!(lattice::hnf_det(&h) as u128 == m.norm);
                return Ok(CompleteSumReport { sum, modulus_norm: m.norm, hypothesis_holds: hyp });
            }
            coords[i] += 1;
            if coords[i] < bounds[i] {
                break;
            }
            coords[i] = 0;
            i += 1;
        }
    }
}

/// Brute-force Euler criterion oracle: is `e` a nonzero square in the residue
/// field of an inert prime? Enumerates all squares of `F_p[x]/(f̄)`.
pub fn inert_symbol_bruteforce(ctx: &FieldContext, e: &IntElement, p: u64) -> i8 {
    let n = ctx.degree;
    let fbar = polymod::from_ints(&ctx.defining_poly, p);
    let target: Vec<u64> = polymod::trim(e.coords.iter().map(|&c| arith::reduce_i128(c, p)).collect());
    if target.is_empty() {
        return 0;
    }
    let total = p.pow(n as u32);
    for idx in 0..total {
        let mut v = Vec::with_capacity(n);
        let mut t = idx;
        for _ in 0..n {
            v.push(t % p);
            t /= p;
        }
        let sq = polymod::mulmod(&v, &v, &fbar, p);
        if sq == target {
            return 1;
        }
    }
    -1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::split_prime;

    fn k1() -> FieldContext {
        FieldContext::shanks_cubic(1).unwrap()
    }

    #[test]
    fn symbol_examples() {
        let k = k1();
        let q = IdealFactorization::prime(&split_prime(&k, 13).unwrap()[0]);
        assert_eq!(residue_symbol(&k, &Element::alpha(3), &q).unwrap(), -1);
        assert_eq!(residue_symbol(&k, &Element::new(vec![-7, 1, 0]), &q).unwrap(), 0);
        let two = IdealFactorization::prime(&split_prime(&k, 2).unwrap()[0]);
        assert_eq!(residue_symbol(&k, &Element::alpha(3), &two), Err(Error::EvenModulus));
    }

    #[test]
    fn mu_infty_examples() {
        let k = k1();
        let a = Element::<i128>::alpha(3);
        let m1 = Element::<i128>::from_int(3, -1);
        assert_eq!(mu_infty(&k, &Element::one(3), &a).unwrap(), 1);
        assert_eq!(mu_infty(&k, &m1, &m1).unwrap(), -1);
        assert_eq!(mu_infty(&k, &a, &a).unwrap(), 1);
    }

    #[test]
    fn inert_euler_matches_bruteforce() {
        let k = k1();
        for p in arith::primes_up_to(50) {
            let primes = split_prime(&k, p).unwrap();
            if primes[0].degree != 3 || p == 2 {
                continue;
            }
            for coords in [[1i128, 2, 3], [5, 0, 1], [2, 0, 0], [0, 1, 0], [p as i128, 0, 0], [3, 7, 11]] {
                let e = Element::new(coords.to_vec());
                assert_eq!(prime_symbol(&k, &e, &primes[0]), inert_symbol_bruteforce(&k, &e, p), "p={p} {coords:?}");
            }
        }
    }

    #[test]
    fn character_of_degree_one_prime_is_legendre() {
        let k = k1();
        let q = IdealFactorization::prime(&split_prime(&k, 13).unwrap()[0]);
        let chi = dirichlet_char(&q).unwrap();
        for l in 0..13 {
            assert_eq!(chi.eval(l), jacobi(l as i128, 13));
            assert_eq!(chi.eval(l), residue_symbol(&k, &Element::from_int(3, l), &q).unwrap());
        }
        assert!(!chi.is_principal());
        assert_eq!(chi.eval(5 + 13), chi.eval(5));
    }

    #[test]
    fn complete_sums() {
        let k = k1();
        let p = split_prime(&k, 13).unwrap()[0].clone();
        let q = IdealFactorization::prime(&p);
        let r = complete_sum_check(&k, &q, CompleteSumMode::Plain).unwrap();
        assert_eq!(r.sum, 0);
        assert!(r.hypothesis_holds);
        let r = complete_sum_check(&k, &q, CompleteSumMode::ConjugatePair).unwrap();
        assert_eq!(r.sum, 0);
        assert_eq!(r.modulus_norm, 169);
        let sq = IdealFactorization::prime_power(&p, 2);
        let r = complete_sum_check(&k, &sq, CompleteSumMode::Plain).unwrap();
        assert!(!r.hypothesis_holds);
        assert_ne!(r.sum, 0);
    }

    #[test]
    fn bracket_routes_agree_for_odd_entries() {
        let k = k1();
        let pairs = [([3i128, 1, 0], [5i128, 2, 1]), ([1, 1, 1], [7, 0, 2]), ([-3, 2, 5], [9, 4, 1]), ([11, 0, 0], [1, 2, 3])];
        let mut checked = 0;
        for (a, b) in pairs {
            let (a, b) = (Element::new(a.to_vec()), Element::new(b.to_vec()));
            if !is_odd_element(&k, &a) || !is_odd_element(&k, &b) || element_symbol(&k, &a, &b).unwrap() == 0 {
                continue;
            }
            assert_eq!(bracket_symbol(&k, &a, &b).unwrap(), bracket_symbol_odd_part(&k, &a, &b).unwrap());
            checked += 1;
        }
        assert!(checked >= 2);
    }
}
