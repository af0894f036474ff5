//! Spins of odd principal ideals, prime spin streams with congruence filters,
//! and the structural spin relations.

use rayon::prelude::*;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldFamily};
use crate::ideals::{self, IdealFactorization, PrimeIdealData};
use crate::symbols;
use crate::units::{self, FundamentalDomain, SquareImage, UnitGroupData};
use crate::IntElement;

/// Unit data and fundamental domain needed to pick canonical generators.
#[derive(Debug, Clone)]
pub struct SpinEngine {
    pub ctx: FieldContext,
    pub units: UnitGroupData,
    pub domain: FundamentalDomain,
}

impl SpinEngine {
    pub fn new(ctx: &FieldContext) -> Result<SpinEngine> {
        if let FieldFamily::LehmerQuintic(_) = ctx.family {
            return Err(Error::Unsupported("spin scans need integral unit generators; lehmer units are rational".into()));
        }
        if ctx.class_number_assumption != 1 {
            return Err(Error::HypothesisViolated("class number one is required for spins".into()));
        }
        let units = UnitGroupData::new(ctx)?;
        let domain = units::build_domain(ctx, &units)?;
        Ok(SpinEngine { ctx: ctx.clone(), units, domain })
    }

    pub fn n(&self) -> usize {
        self.ctx.degree
    }

    /// Canonical totally positive generator of a principal ideal.
    pub fn canonical_generator(&self, a: &IdealFactorization) -> Result<IntElement> {
        let g = ideals::find_generator(&self.ctx, a)?;
        self.domain.canonical_associate(&self.ctx, &self.units, &g)
    }

    /// `spin(σ^k, 𝔞) = (g / 𝔞^{σ^k})` for a totally positive generator `g`.
    pub fn spin_with_generator(&self, g: &IntElement, a: &IdealFactorization, k: usize) -> Result<i8> {
        if !a.is_odd() {
            return Err(Error::EvenIdeal);
        }
        check_power(k, self.n())?;
        let target = ideals::conjugate_ideal(&self.ctx, a, k)?;
        symbols::residue_symbol(&self.ctx, g, &target)
    }

    pub fn spin(&self, a: &IdealFactorization, k: usize) -> Result<i8> {
        if !a.is_odd() {
            return Err(Error::EvenIdeal);
        }
        let g = self.canonical_generator(a)?;
        self.spin_with_generator(&g, a, k)
    }

    /// Spins of all primes above `p`, in position order. The generator of
    /// `σ^j(𝔭_0)` is `σ^j(g_0)` brought back into the domain.
    pub fn prime_records(&self, p: u64, x: u64, filters: &SpinFilters, image: Option<&SquareImage>) -> Result<PrimeScan> {
        let ctx = &self.ctx;
        let n = self.n();
        let mut scan = PrimeScan::default();
        let primes = ideals::split_prime(ctx, p)?;
        let primes: Vec<PrimeIdealData> = primes.into_iter().filter(|q| q.norm() <= x as u128).collect();
        if primes.is_empty() {
            return Ok(scan);
        }
        if filters.degree_one_only && primes[0].degree != 1 {
            return Ok(scan);
        }
        let split = primes[0].is_split();
        if p == 2 && split {
            // spins at dyadic conjugates are not defined
            return Ok(scan);
        }
        let g0 = match self.canonical_generator(&IdealFactorization::prime(&primes[0])) {
            Ok(g) => g,
            Err(Error::GeneratorNotFound { .. }) => {
                scan.generator_failures.extend(primes);
                return Ok(scan);
            }
            Err(e) => return Err(e),
        };
        for q in &primes {
            let g = if split && q.position != 0 {
                let c = ctx.apply_automorphism(&g0, q.position);
                self.domain.reduce(ctx, &c)?
            } else {
                g0.clone()
            };
            let mut spins = Vec::with_capacity(n - 1);
            for k in 1..n {
                if !split {
                    spins.push(0);
                    continue;
                }
                let target = &primes[(q.position + k) % n];
                spins.push(symbols::prime_symbol(ctx, &g, target));
            }
            let rep = match filters.matching_representative(ctx, &self.units, &g, image) {
                Some(r) => r,
                None => {
                    scan.filtered_out += 1;
                    continue;
                }
            };
            let gen_mod_m = filters.mod_m.as_ref().map(|(m, _)| rep.reduce_mod(*m).coords);
            scan.records.push(SpinRecord { prime: q.clone(), gen_mod8: rep.reduce_mod(8).coords, generator: rep, spins, gen_mod_m });
        }
        Ok(scan)
    }

    /// Prime spin stream for all primes of norm at most `x`, ascending by
    /// `(norm, p, position)`; output is independent of the worker count.
    pub fn spin_prime_stream(&self, x: u64, filters: &SpinFilters) -> Result<SpinStream> {
        let image = filters.square_image(&self.ctx, &self.units);
        let n = self.n() as u32;
        let small = arith::iroot(x, n);
        let primes: Vec<u64> = arith::guarded_primes(x)?
            .into_iter()
            .filter(|&p| p <= small || !ideals::degree_one_primes(&self.ctx, p).map(|v| v.is_empty()).unwrap_or(true))
            .collect();
        let scans: Vec<Result<PrimeScan>> =
            primes.par_iter().map(|&p| self.prime_records(p, x, filters, image.as_ref())).collect();
        let mut out = SpinStream::default();
        for s in scans {
            let s = s?;
            out.records.extend(s.records);
            out.generator_failures.extend(s.generator_failures);
            out.filtered_out += s.filtered_out;
        }
        out.records.sort_by_key(|r| (r.prime.norm(), r.prime.p, r.prime.position));
        out.generator_failures.sort_by_key(|q| (q.norm(), q.p, q.position));
        Ok(out)
    }

    /// `spin(𝔞𝔟) = μ(β⁻, α) (α / β′β⁻) spin(𝔞) spin(𝔟)` for `σ^k`, with
    /// `β′ = σ^k β` and `β⁻ = σ^{-k} β`. The left side uses the canonical
    /// generator of `𝔞𝔟` found independently.
    pub fn twisted_multiplicativity_check(&self, a: &IdealFactorization, b: &IdealFactorization, k: usize) -> Result<bool> {
        let ctx = &self.ctx;
        let n = self.n();
        check_power(k, n)?;
        if !a.is_odd() || !b.is_odd() {
            return Err(Error::EvenIdeal);
        }
        for j in 0..n {
            if !a.is_coprime(&ideals::conjugate_ideal(ctx, b, j)?) {
                return Err(Error::NotCoprime);
            }
        }
        let alpha = self.canonical_generator(a)?;
        let beta = self.canonical_generator(b)?;
        let lhs = self.spin(&a.mul(b), k)?;
        let beta_p = ctx.apply_automorphism(&beta, k);
        let beta_m = ctx.apply_automorphism(&beta, n - k);
        let (mu, _) = if b.is_unit() || a.is_unit() { (1, 1) } else { symbols::mu_and_mu2(ctx, &beta_m, &alpha)? };
        let cross = symbols::element_symbol(ctx, &alpha, &ctx.mul(&beta_p, &beta_m))?;
        let rhs = mu * cross * self.spin_with_generator(&alpha, a, k)? * self.spin_with_generator(&beta, b, k)?;
        Ok(lhs == rhs)
    }

    /// `spin(σ, 𝔭) = spin(σ^{-1}, 𝔭) μ₂(g, σg)`, and `spin(σ, 𝔭) = spin(σ^{-1}, 𝔭)`
    /// when `g ≡ 1 mod 4`.
    pub fn conjugation_relation_check(&self, q: &PrimeIdealData) -> Result<ConjugationCheck> {
        let ctx = &self.ctx;
        let n = self.n();
        let a = IdealFactorization::prime(q);
        let g = self.canonical_generator(&a)?;
        let s1 = self.spin_with_generator(&g, &a, 1)?;
        let s_last = self.spin_with_generator(&g, &a, n - 1)?;
        let one_mod4 = g.reduce_mod(4).is_one();
        if !q.is_split() {
            return Ok(ConjugationCheck { spin_first: s1, spin_last: s_last, mu2: None, one_mod4, holds: s1 == 0 && s_last == 0 });
        }
        let sg = ctx.apply_automorphism(&g, 1);
        let (_, mu2) = symbols::mu_and_mu2(ctx, &g, &sg)?;
        let holds = s1 == s_last * mu2 && (!one_mod4 || s1 == s_last);
        Ok(ConjugationCheck { spin_first: s1, spin_last: s_last, mu2: Some(mu2), one_mod4, holds })
    }
}

fn check_power(k: usize, n: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("automorphism power {k} outside 1..{}", n - 1)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinRecord {
    pub prime: PrimeIdealData,
    /// Canonical generator, or its unit-square multiple in the filtered class.
    pub generator: IntElement,
    /// `spins[k - 1] = spin(σ^k, 𝔭)` for `k = 1..n-1`.
    pub spins: Vec<i8>,
    pub gen_mod8: Vec<i128>,
    pub gen_mod_m: Option<Vec<i128>>,
}

impl SpinRecord {
    pub fn spin(&self, k: usize) -> i8 {
        self.spins[k - 1]
    }
}

#[derive(Debug, Clone, Default)]
pub struct PrimeScan {
    pub records: Vec<SpinRecord>,
    pub generator_failures: Vec<PrimeIdealData>,
    pub filtered_out: usize,
}

pub type SpinStream = PrimeScan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugationCheck {
    pub spin_first: i8,
    pub spin_last: i8,
    pub mu2: Option<i8>,
    pub one_mod4: bool,
    pub holds: bool,
}

/// Congruence conditions on the unit-square orbit of the generator.
#[derive(Debug, Clone, Default)]
pub struct SpinFilters {
    pub degree_one_only: bool,
    /// Generator class modulo 8, as coordinates in `[0, 8)`.
    pub mod8: Option<Vec<i128>>,
    /// `(M, μ)`: generator `≡ μ (mod M)` for a rational modulus `M`.
    pub mod_m: Option<(i128, Vec<i128>)>,
}

impl SpinFilters {
    pub fn modulus(&self) -> Option<i128> {
        match (&self.mod8, &self.mod_m) {
            (None, None) => None,
            (Some(_), None) => Some(8),
            (None, Some((m, _))) => Some(*m),
            (Some(_), Some((m, _))) => Some(8 / arith::gcd_i128(8, *m) * m),
        }
    }

    pub fn square_image(&self, ctx: &FieldContext, ug: &UnitGroupData) -> Option<SquareImage> {
        self.modulus().map(|m| units::square_image(ctx, ug, m))
    }

    fn accepts(&self, e: &IntElement) -> bool {
        if let Some(c) = &self.mod8 {
            if &e.reduce_mod(8).coords != c {
                return false;
            }
        }
        if let Some((m, c)) = &self.mod_m {
            if &e.reduce_mod(*m).coords != c {
                return false;
            }
        }
        true
    }

    /// Some `g u²` in the requested classes, or `None` if the orbit misses them.
    pub fn matching_representative(
        &self,
        ctx: &FieldContext,
        ug: &UnitGroupData,
        g: &IntElement,
        image: Option<&SquareImage>,
    ) -> Option<IntElement> {
        let image = match image {
            None => return Some(g.clone()),
            Some(i) => i,
        };
        let m = image.modulus;
        let gm = g.reduce_mod(m);
        for (res, exps) in &image.elements {
            let prod = ctx.mul(&gm, &crate::Element::new(res.clone())).reduce_mod(m);
            if self.accepts(&prod) {
                let u = ug.unit_from_exponents(ctx, exps);
                return Some(ctx.mul(g, &u));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> SpinEngine {
        SpinEngine::new(&FieldContext::shanks_cubic(1).unwrap()).unwrap()
    }

    #[test]
    fn ramified_prime_has_zero_spin() {
        let e = engine();
        let q = ideals::split_prime(&e.ctx, 7).unwrap()[0].clone();
        assert_eq!(e.spin(&IdealFactorization::prime(&q), 1).unwrap(), 0);
    }

    #[test]
    fn spin_is_invariant_under_unit_squares() {
        let e = engine();
        let q = ideals::split_prime(&e.ctx, 13).unwrap()[0].clone();
        let a = IdealFactorization::prime(&q);
        let g = e.canonical_generator(&a).unwrap();
        let s = e.spin_with_generator(&g, &a, 1).unwrap();
        assert!(s == 1 || s == -1);
        for exps in [[1, 0], [0, 1], [-1, 2]] {
            let u = e.units.unit_from_exponents(&e.ctx, &exps);
            let g2 = e.ctx.mul(&g, &e.ctx.mul(&u, &u));
            assert_eq!(e.spin_with_generator(&g2, &a, 1).unwrap(), s);
        }
    }

    #[test]
    fn stream_small() {
        let e = engine();
        let s = e.spin_prime_stream(13, &SpinFilters::default()).unwrap();
        let norms: Vec<u128> = s.records.iter().map(|r| r.prime.norm()).collect();
        assert_eq!(norms, vec![7, 8, 13, 13, 13]);
        assert!(s.generator_failures.is_empty());
        let f = SpinFilters { degree_one_only: true, ..Default::default() };
        assert!(e.spin_prime_stream(6, &f).unwrap().records.is_empty());
    }

    #[test]
    fn filter_mod8_contract() {
        let e = engine();
        let f = SpinFilters { mod8: Some(vec![1, 0, 0]), ..Default::default() };
        let s = e.spin_prime_stream(2000, &f).unwrap();
        assert!(!s.records.is_empty());
        for r in &s.records {
            assert_eq!(r.gen_mod8, vec![1, 0, 0]);
            assert!(e.ctx.is_totally_positive(&r.generator).unwrap());
            assert_eq!(e.ctx.norm(&r.generator) as u128, r.prime.norm());
        }
    }

    #[test]
    fn twisted_multiplicativity_identity() {
        let e = engine();
        let q = ideals::split_prime(&e.ctx, 13).unwrap()[0].clone();
        let a = IdealFactorization::prime(&q);
        assert!(e.twisted_multiplicativity_check(&a, &IdealFactorization::unit(), 1).unwrap());
        let b = IdealFactorization::prime(&ideals::split_prime(&e.ctx, 29).unwrap()[1]);
        assert!(e.twisted_multiplicativity_check(&a, &b, 1).unwrap());
        assert!(e.twisted_multiplicativity_check(&a, &b, 2).unwrap());
    }

    #[test]
    fn conjugation_relation_small() {
        let e = engine();
        for q in ideals::enumerate_prime_ideals(&e.ctx, 500).unwrap() {
            if q.p == 2 || q.degree != 1 {
                continue;
            }
            assert!(e.conjugation_relation_check(&q).unwrap().holds, "{q:?}");
        }
    }
}
