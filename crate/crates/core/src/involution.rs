//! Spins for the involution of a real quadratic field `K = Q(√d)` (so the
//! fixed field is `L = Q`), their closed form as a Jacobi symbol of the half
//! trace, and the associated prime sums.

use rayon::prelude::*;

use crate::arith::{self, jacobi};
use crate::error::{Error, Result};
use crate::field::{Element, FieldContext, FieldFamily};
use crate::ideals::{self, IdealFactorization, PrimeIdealData};
use crate::spin::SpinEngine;
use crate::symbols;
use crate::IntElement;

/// A real quadratic field with its spin engine and the class structure of
/// `ε²` modulo 8.
pub struct QuadraticSetting {
    pub d: i64,
    pub engine: SpinEngine,
    /// `ε^{2j} mod 8` for `j = 0..order`.
    eps_sq_powers_mod8: Vec<IntElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSpinRecord {
    pub p: u64,
    pub prime: PrimeIdealData,
    /// Totally positive generator `≡ 1 mod 8`.
    pub pi: IntElement,
    /// `β = ½(π + σπ)`.
    pub beta: i128,
    /// `γ² = (½(π − σπ))²`, a rational integer.
    pub gamma_sq: i128,
    pub spin_direct: i8,
    pub spin_formula: i8,
    /// `β ≡ 1 (mod 4)`, `γ ≡ 0 (mod 4)` and `N(π) = β² − γ²`.
    pub parity_ok: bool,
}

impl QuadSpinRecord {
    pub fn agree(&self) -> bool {
        self.spin_direct == self.spin_formula
    }
}

impl QuadraticSetting {
    pub fn new(d: i64) -> Result<QuadraticSetting> {
        let ctx = FieldContext::real_quadratic(d)?;
        let engine = SpinEngine::new(&ctx)?;
        let eps = engine.units.generators[1].clone();
        let eps_sq = ctx.mul(&eps, &eps).reduce_mod(8);
        let one = Element::<i128>::one(2);
        let mut eps_sq_powers_mod8 = vec![one.clone()];
        let mut cur = eps_sq.clone();
        while cur != one {
            eps_sq_powers_mod8.push(cur.clone());
            cur = ctx.mul(&cur, &eps_sq).reduce_mod(8);
        }
        Ok(QuadraticSetting { d, engine, eps_sq_powers_mod8 })
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.engine.ctx
    }

    /// `π ε^{2j}` with the smallest `|j|` (ties to `j ≥ 0`) that is `≡ 1 mod 8`.
    pub fn qualifying_generator(&self, pi: &IntElement) -> Result<IntElement> {
        let ctx = self.ctx();
        let order = self.eps_sq_powers_mod8.len();
        let pm = pi.reduce_mod(8);
        let one = Element::<i128>::one(2);
        let hit = (0..order).find(|&j| ctx.mul(&pm, &self.eps_sq_powers_mod8[j]).reduce_mod(8) == one);
        let j = hit.ok_or_else(|| Error::HypothesisViolated("no generator congruent to 1 mod 8 in the unit-square orbit".into()))?;
        let (exp, inverse) = if j <= order - j { (j, false) } else { (order - j, true) };
        let eps = if inverse { &self.engine.units.inverses[1] } else { &self.engine.units.generators[1] };
        let e2 = ctx.mul(eps, eps);
        let mut out = pi.clone();
        for _ in 0..exp {
            out = ctx.mul(&out, &e2);
        }
        Ok(out)
    }

    /// `spin(σ, 𝔞) = (π / 𝔞^σ)` through the symbol machinery of `K`, with `π`
    /// the qualifying generator.
    pub fn spin_involution_direct(&self, a: &IdealFactorization) -> Result<(IntElement, i8)> {
        let g = self.engine.canonical_generator(a)?;
        let pi = self.qualifying_generator(&g)?;
        let conj = ideals::conjugate_ideal(self.ctx(), a, 1)?;
        Ok((pi.clone(), symbols::residue_symbol(self.ctx(), &pi, &conj)?))
    }

    /// `(β / d)` with `β = ½ Tr π`.
    pub fn spin_involution_formula(&self, pi: &IntElement) -> Result<i8> {
        let ctx = self.ctx();
        if !ctx.is_totally_positive(pi)? {
            return Err(Error::HypothesisViolated("generator not totally positive".into()));
        }
        if !pi.reduce_mod(8).is_one() {
            return Err(Error::HypothesisViolated("generator not congruent to 1 mod 8".into()));
        }
        // a common prime of π and σπ divides both π + σπ and πσπ
        if arith::gcd_i128(ctx.norm(pi), ctx.trace(pi)) != 1 {
            return Err(Error::HypothesisViolated("generator not coprime to its conjugate".into()));
        }
        Ok(jacobi(half_trace(ctx, pi), self.d as u64))
    }

    pub fn record(&self, q: &PrimeIdealData) -> Result<QuadSpinRecord> {
        let ctx = self.ctx();
        let a = IdealFactorization::prime(q);
        let (pi, spin_direct) = self.spin_involution_direct(&a)?;
        let spin_formula = self.spin_involution_formula(&pi)?;
        let beta = half_trace(ctx, &pi);
        // γ = ½(π − σπ) = (b/2)(2ω − 1) for π = a + bω, so γ² = b²d/4
        let b = pi.coords[1];
        let gamma_sq = b * b * self.d as i128 / 4;
        let parity_ok = b % 8 == 0 && beta.rem_euclid(4) == 1 && ctx.norm(&pi) == beta * beta - gamma_sq;
        Ok(QuadSpinRecord { p: q.p, prime: q.clone(), pi, beta, gamma_sq, spin_direct, spin_formula, parity_ok })
    }

    /// Records for every odd split prime `𝔓` of norm at most `x` with a
    /// qualifying generator, ascending by `(p, position)`.
    pub fn scan(&self, x: u64) -> Result<QuadScan> {
        let ctx = self.ctx();
        let primes: Vec<u64> = arith::guarded_primes(x)?.into_iter().filter(|&p| p > 2).collect();
        let parts: Vec<Result<(Vec<QuadSpinRecord>, usize)>> = primes
            .par_iter()
            .map(|&p| {
                let mut recs = Vec::new();
                let mut skipped = 0;
                for q in ideals::degree_one_primes(ctx, p)? {
                    if !q.is_split() {
                        continue;
                    }
                    match self.record(&q) {
                        Ok(r) => recs.push(r),
                        Err(Error::HypothesisViolated(_)) => skipped += 1,
                        Err(e) => return Err(e),
                    }
                }
                Ok((recs, skipped))
            })
            .collect();
        let mut out = QuadScan::default();
        for part in parts {
            let (r, s) = part?;
            out.records.extend(r);
            out.unqualified += s;
        }
        Ok(out)
    }
}

fn half_trace(ctx: &FieldContext, pi: &IntElement) -> i128 {
    ctx.trace(pi) / 2
}

#[derive(Debug, Clone, Default)]
pub struct QuadScan {
    pub records: Vec<QuadSpinRecord>,
    /// Split primes whose unit-square orbit misses `1 mod 8`.
    pub unqualified: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionSum {
    pub sum: i64,
    pub count: u64,
    pub disagreements: u64,
    /// The complete sum over `δ mod 𝔇`, `(δ, 𝔇) = 1`, of `((δ + δ^σ) / 𝔇)`.
    pub complete_sum: i64,
}

pub fn involution_spin_sum(setting: &QuadraticSetting, x: u64) -> Result<InvolutionSum> {
    let scan = setting.scan(x)?;
    let sum = scan.records.iter().map(|r| r.spin_direct as i64).sum();
    let disagreements = scan.records.iter().filter(|r| !r.agree()).count() as u64;
    Ok(InvolutionSum { sum, count: scan.records.len() as u64, disagreements, complete_sum: complete_trace_sum(setting.d) })
}

/// `Σ_{δ ∈ O/dO, (Nδ, d) = 1} ((δ + δ^σ) / d)`; with `δ = a + bω` the trace
/// is `2a + b` and the norm `a² + ab − b²(d − 1)/4`.
pub fn complete_trace_sum(d: i64) -> i64 {
    let d = d as i128;
    let c = (d - 1) / 4;
    let mut s = 0i64;
    for a in 0..d {
        for b in 0..d {
            let norm = a * a + a * b - b * b * c;
            if arith::gcd_i128(norm.rem_euclid(d), d) != 1 {
                continue;
            }
            s += jacobi(2 * a + b, d as u64) as i64;
        }
    }
    s
}

/// `(x / 𝔓)_K` by Euler's criterion in `O/𝔓`: `x^{(p−1)/2} ∓ 1 ∈ 𝔓`, tested
/// by ideal membership; compared with the Legendre symbol `(x / p)`.
pub fn rational_symbol_check(ctx: &FieldContext, x: i64, q: &PrimeIdealData) -> Result<bool> {
    if !matches!(ctx.family, FieldFamily::RealQuadratic(_)) || !q.is_split() || !q.is_odd() {
        return Err(Error::InvalidParameter("needs an odd split prime of a real quadratic field".into()));
    }
    let p = q.p as i128;
    if (x as i128).rem_euclid(p) == 0 {
        return Err(Error::NotCoprime);
    }
    let h = ideals::ideal_hnf(ctx, &IdealFactorization::prime(q))?;
    let base = Element::<i128>::from_int(2, x);
    let mut acc = Element::<i128>::one(2);
    let mut b = base.reduce_mod(p);
    let mut e = (q.p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = ctx.mul(&acc, &b).reduce_mod(p);
        }
        b = ctx.mul(&b, &b).reduce_mod(p);
        e >>= 1;
    }
    let one = Element::<i128>::one(2);
    let k_symbol = if ideals::ideal_contains(&h, &acc.sub(&one)) {
        1
    } else if ideals::ideal_contains(&h, &acc.add(&one)) {
        -1
    } else {
        return Err(Error::InvalidParameter("Euler criterion produced neither ±1".into()));
    };
    Ok(k_symbol == jacobi(x as i128, q.p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_sums_vanish() {
        for d in [5, 13, 17, 21, 29] {
            assert_eq!(complete_trace_sum(d), 0, "d={d}");
        }
    }

    #[test]
    fn first_primes_agree() {
        for d in [5, 13, 17] {
            let s = QuadraticSetting::new(d).unwrap();
            let scan = s.scan(2000).unwrap();
            assert!(!scan.records.is_empty());
            for r in &scan.records {
                assert!(r.agree(), "d={d} {r:?}");
                assert!(r.parity_ok, "d={d} {r:?}");
            }
        }
    }

    #[test]
    fn rational_symbol_small() {
        let k = FieldContext::real_quadratic(5).unwrap();
        let q = ideals::split_prime(&k, 11).unwrap()[0].clone();
        assert!(rational_symbol_check(&k, 2, &q).unwrap());
        assert!(rational_symbol_check(&k, 1, &q).unwrap());
        assert!(rational_symbol_check(&k, 9, &q).unwrap());
        assert_eq!(jacobi(2, 11), -1);
    }

    #[test]
    fn formula_is_legendre_mod_d() {
        let s = QuadraticSetting::new(13).unwrap();
        let squares: Vec<i128> = (1..13).map(|t: i128| t * t % 13).collect();
        for r in s.scan(3000).unwrap().records.iter().take(20) {
            let b = r.beta.rem_euclid(13);
            let brute = if b == 0 { 0 } else if squares.contains(&b) { 1 } else { -1 };
            assert_eq!(r.spin_formula, brute);
        }
    }
}
