//! Prime ideals, factored ideals, generators and the arithmetic functions
//! `Λ`, `μ`, `τ` on ideals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{self, inv_mod, mul_mod};
use crate::error::{Error, Result};
use crate::field::{Element, FieldContext};
use crate::lattice;
use crate::polymod;
use crate::IntElement;

/// A prime ideal of the power-basis order. For degree one, `𝔭 = (p, α − r)`.
/// Split primes are numbered so that `σ^k(𝔭_0) = 𝔭_k`, where `𝔭_0` has the
/// smallest root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeIdealData {
    pub p: u64,
    pub position: usize,
    pub degree: u32,
    pub ramification: u32,
    pub root: Option<u64>,
}

impl PrimeIdealData {
    pub fn norm(&self) -> u128 {
        (self.p as u128).pow(self.degree)
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    pub fn is_split(&self) -> bool {
        self.degree == 1 && self.ramification == 1
    }
}

/// An ideal as a sorted product of prime powers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdealFactorization {
    pub norm: u128,
    pub factors: Vec<(PrimeIdealData, u32)>,
}

impl IdealFactorization {
    pub fn unit() -> Self {
        IdealFactorization { norm: 1, factors: Vec::new() }
    }

    pub fn prime(p: &PrimeIdealData) -> Self {
        IdealFactorization { norm: p.norm(), factors: vec![(p.clone(), 1)] }
    }

    pub fn prime_power(p: &PrimeIdealData, e: u32) -> Self {
        if e == 0 {
            return Self::unit();
        }
        IdealFactorization { norm: p.norm().pow(e), factors: vec![(p.clone(), e)] }
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.factors.iter().all(|(p, _)| p.is_odd())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut map: BTreeMap<PrimeIdealData, u32> = BTreeMap::new();
        for (p, e) in self.factors.iter().chain(&other.factors) {
            *map.entry(p.clone()).or_insert(0) += e;
        }
        IdealFactorization { norm: self.norm * other.norm, factors: map.into_iter().collect() }
    }

    /// `self / other`, `None` unless `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut map: BTreeMap<PrimeIdealData, u32> = self.factors.iter().cloned().collect();
        for (p, e) in &other.factors {
            let cur = map.get_mut(p)?;
            if *cur < *e {
                return None;
            }
            *cur -= e;
        }
        map.retain(|_, e| *e > 0);
        Some(IdealFactorization { norm: self.norm / other.norm, factors: map.into_iter().collect() })
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div(self).is_some()
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.factors.iter().all(|(p, _)| other.factors.iter().all(|(q, _)| p != q))
    }

    pub fn exponent_of(&self, p: &PrimeIdealData) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn moebius(&self) -> i8 {
        if self.factors.iter().any(|(_, e)| *e > 1) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `Λ(𝔫)` as the exact integer `N𝔭` whose logarithm it is, or `None` when
    /// `𝔫` is not a prime power.
    pub fn mangoldt(&self) -> Option<u64> {
        match self.factors.as_slice() {
            [(p, _)] => Some(p.norm() as u64),
            _ => None,
        }
    }

    pub fn mangoldt_f64(&self) -> f64 {
        self.mangoldt().map(|q| (q as f64).ln()).unwrap_or(0.0)
    }

    pub fn tau(&self) -> u64 {
        self.factors.iter().map(|(_, e)| *e as u64 + 1).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// All divisors, sorted.
    pub fn divisors(&self) -> Vec<IdealFactorization> {
        let mut out = vec![IdealFactorization::unit()];
        for (p, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
            for d in &out {
                for k in 0..=*e {
                    next.push(d.mul(&IdealFactorization::prime_power(p, k)));
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

// ---- splitting ----

/// `σ^j(α)` reduced modulo `p`, as a polynomial in `α` over `F_p`.
fn automorphism_poly_mod(ctx: &FieldContext, j: usize, p: u64) -> Option<Vec<u64>> {
    let coords = &ctx.automorphisms[j % ctx.degree][1];
    coords.iter().map(|c| rational_mod(c, p)).collect()
}

pub fn rational_mod(c: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = c.numer().mod_floor(&pb).to_u64()?;
    let den = c.denom().mod_floor(&pb).to_u64()?;
    let inv = inv_mod(den, p)?;
    Some(mul_mod(num, inv, p))
}

fn split_primes_from_roots(ctx: &FieldContext, p: u64, roots: &[u64]) -> Result<Vec<PrimeIdealData>> {
    let n = ctx.degree;
    let r0 = roots[0];
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let h = automorphism_poly_mod(ctx, n - k, p)
            .ok_or_else(|| Error::Unsupported(format!("automorphism not defined modulo {p}")))?;
        let r = polymod::eval(&h, r0, p);
        out.push(PrimeIdealData { p, position: k, degree: 1, ramification: 1, root: Some(r) });
    }
    let mut seen: Vec<u64> = out.iter().map(|q| q.root.unwrap()).collect();
    seen.sort_unstable();
    if seen != roots {
        return Err(Error::Unsupported(format!("roots modulo {p} are not a single σ-orbit")));
    }
    Ok(out)
}

/// Prime ideals above the rational prime `p`, ordered by position.
pub fn split_prime(ctx: &FieldContext, p: u64) -> Result<Vec<PrimeIdealData>> {
    if !arith::is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    let n = ctx.degree;
    let fp = polymod::from_ints(&ctx.defining_poly, p);
    let factors = polymod::factor(&fp, p);
    if factors.len() == n && factors.iter().all(|(g, e)| g.len() == 2 && *e == 1) {
        let mut roots: Vec<u64> = factors.iter().map(|(g, _)| (p - g[0]) % p).collect();
        roots.sort_unstable();
        return split_primes_from_roots(ctx, p, &roots);
    }
    if factors.len() == 1 {
        let (g, e) = &factors[0];
        if *e == 1 && g.len() == n + 1 {
            return Ok(vec![PrimeIdealData { p, position: 0, degree: n as u32, ramification: 1, root: None }]);
        }
        if g.len() == 2 && *e as usize == n {
            return Ok(vec![PrimeIdealData {
                p,
                position: 0,
                degree: 1,
                ramification: n as u32,
                root: Some((p - g[0]) % p),
            }]);
        }
    }
    Err(Error::Unsupported(format!("splitting of {p} is not of cyclic type (index prime)")))
}

/// Degree-one prime ideals above `p` only, cheaper than [`split_prime`] for
/// large `p`.
pub fn degree_one_primes(ctx: &FieldContext, p: u64) -> Result<Vec<PrimeIdealData>> {
    if !arith::is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    let disc_p = (&ctx.poly_disc % BigInt::from(p)).is_zero();
    if disc_p {
        return Ok(split_prime(ctx, p)?.into_iter().filter(|q| q.degree == 1).collect());
    }
    let roots = polymod::roots(&polymod::from_ints(&ctx.defining_poly, p), p);
    if roots.len() == ctx.degree {
        split_primes_from_roots(ctx, p, &roots)
    } else {
        Ok(Vec::new())
    }
}

/// All prime ideals of norm at most `x`, ascending by (norm, p, position).
pub fn enumerate_prime_ideals(ctx: &FieldContext, x: u64) -> Result<Vec<PrimeIdealData>> {
    if x < 2 {
        return Ok(Vec::new());
    }
    let n = ctx.degree as u32;
    let small = arith::iroot(x, n);
    let primes = arith::guarded_primes(x)?;
    let chunks: Vec<Result<Vec<PrimeIdealData>>> = primes
        .par_chunks(4096)
        .map(|chunk| {
            let mut out = Vec::new();
            for &p in chunk {
                let list = if p <= small { split_prime(ctx, p)? } else { degree_one_primes(ctx, p)? };
                out.extend(list.into_iter().filter(|q| q.norm() <= x as u128));
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for c in chunks {
        all.extend(c?);
    }
    all.sort_by_key(|q| (q.norm(), q.p, q.position));
    Ok(all)
}

/// All nonzero ideals of norm at most `x`, sorted by (norm, factors).
pub fn enumerate_ideals(ctx: &FieldContext, x: u64) -> Result<Vec<IdealFactorization>> {
    let primes = enumerate_prime_ideals(ctx, x)?;
    let mut out = Vec::new();
    fn rec(primes: &[PrimeIdealData], start: usize, cur: &IdealFactorization, x: u128, out: &mut Vec<IdealFactorization>) {
        out.push(cur.clone());
        for i in start..primes.len() {
            let q = primes[i].norm();
            if cur.norm * q > x {
                break;
            }
            let mut next = cur.mul(&IdealFactorization::prime(&primes[i]));
            while next.norm <= x {
                rec(primes, i + 1, &next, x, out);
                next = next.mul(&IdealFactorization::prime(&primes[i]));
            }
        }
    }
    rec(&primes, 0, &IdealFactorization::unit(), x as u128, &mut out);
    out.sort();
    Ok(out)
}

/// `σ^k(𝔭)`.
pub fn conjugate_prime(ctx: &FieldContext, q: &PrimeIdealData, k: usize) -> Result<PrimeIdealData> {
    if !q.is_split() {
        return Ok(q.clone());
    }
    let n = ctx.degree;
    let all = split_prime(ctx, q.p)?;
    Ok(all[(q.position + k) % n].clone())
}

pub fn conjugate_ideal(ctx: &FieldContext, a: &IdealFactorization, k: usize) -> Result<IdealFactorization> {
    let mut out = IdealFactorization::unit();
    for (q, e) in &a.factors {
        out = out.mul(&IdealFactorization::prime_power(&conjugate_prime(ctx, q, k)?, *e));
    }
    Ok(out)
}

// ---- residues and valuations ----

/// `e mod 𝔭` for a degree-one prime: substitute `α ↦ r`.
pub fn residue_of(e: &IntElement, q: &PrimeIdealData) -> u64 {
    let r = q.root.expect("residue_of needs a degree-one prime");
    let p = q.p;
    e.coords
        .iter()
        .rev()
        .fold(0u64, |acc, &c| (mul_mod(acc, r, p) + arith::reduce_i128(c, p)) % p)
}

/// Lift the root of a split prime to a root of the defining polynomial
/// modulo `p^k`.
fn hensel_root(ctx: &FieldContext, q: &PrimeIdealData, k: u32) -> BigInt {
    let p = BigInt::from(q.p);
    let f: Vec<BigInt> = ctx.defining_poly.iter().map(|&c| BigInt::from(c)).collect();
    let fd: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let eval = |poly: &[BigInt], x: &BigInt, m: &BigInt| -> BigInt {
        poly.iter().rev().fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(m))
    };
    let mut r = BigInt::from(q.root.unwrap());
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = p.pow(prec);
        let fv = eval(&f, &r, &m);
        let dv = eval(&fd, &r, &m);
        let inv = mod_inverse(&dv, &m).expect("unramified root has invertible derivative");
        r = (&r - fv * inv).mod_floor(&m);
    }
    r
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

fn vp_big(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        return u32::MAX;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while (&y % &pb).is_zero() {
        y /= &pb;
        v += 1;
    }
    v
}

/// `v_𝔭(e)` for nonzero integral `e`.
pub fn valuation(ctx: &FieldContext, e: &IntElement, q: &PrimeIdealData) -> u32 {
    let p = q.p;
    if q.degree as usize == ctx.degree {
        // inert: 𝔭 = pO
        return e.coords.iter().filter(|&&c| c != 0).map(|&c| vp_big(&BigInt::from(c), p)).min().unwrap_or(u32::MAX);
    }
    let norm = ctx.norm(&e.convert::<BigInt>().unwrap());
    let vn = vp_big(&norm, p);
    if q.ramification > 1 || vn == 0 {
        return vn;
    }
    let m = BigInt::from(p).pow(vn + 1);
    let r = hensel_root(ctx, q, vn + 1);
    let val = e
        .coords
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &c| (acc * &r + BigInt::from(c)).mod_floor(&m));
    vp_big(&val, p).min(vn)
}

/// Factorisation of the principal ideal `(e)`.
pub fn factor_element(ctx: &FieldContext, e: &IntElement) -> Result<IdealFactorization> {
    if e.is_zero() {
        return Err(Error::InvalidParameter("cannot factor zero".into()));
    }
    let norm = ctx.norm(&e.convert::<BigInt>().unwrap()).abs();
    let norm_u = norm
        .to_u128()
        .ok_or_else(|| Error::InvalidParameter("norm exceeds 128 bits".into()))?;
    let mut out = IdealFactorization::unit();
    for (p, k) in arith::factorize_u128(norm_u) {
        let p = p as u64;
        let mut total = 0u32;
        for q in split_prime(ctx, p)? {
            let v = valuation(ctx, e, &q);
            if v > 0 {
                total += v * q.degree;
                out = out.mul(&IdealFactorization::prime_power(&q, v));
            }
        }
        if total != k {
            return Err(Error::Unsupported(format!("valuations above {p} do not account for the norm")));
        }
    }
    Ok(out)
}

// ---- lattices and generators ----

fn prime_lattice(ctx: &FieldContext, q: &PrimeIdealData) -> Vec<Vec<i128>> {
    let n = ctx.degree;
    let p = q.p as i128;
    let mut gens: Vec<Vec<i128>> = (0..n)
        .map(|j| {
            let mut v = vec![0; n];
            v[j] = p;
            v
        })
        .collect();
    if let Some(r) = q.root {
        let lin = Element::new({
            let mut v = vec![0i128; n];
            v[0] = -(r as i128);
            v[1] = 1;
            v
        });
        let mut cur = lin;
        for _ in 0..n {
            gens.push(cur.coords.clone());
            cur = ctx.mul(&cur, &Element::alpha(n));
        }
    }
    lattice::hnf_mod(&gens, q.norm() as i128, n)
}

fn lattice_product(ctx: &FieldContext, a: &[Vec<i128>], b: &[Vec<i128>], d: i128) -> Vec<Vec<i128>> {
    let n = ctx.degree;
    let mut gens = Vec::with_capacity(n * n);
    for x in a {
        for y in b {
            let prod = ctx.mul(&Element::new(x.clone()), &Element::new(y.clone()));
            gens.push(prod.reduce_mod(d).coords);
        }
    }
    lattice::hnf_mod(&gens, d, n)
}

/// Lower triangular HNF basis of the ideal as a sublattice of the power-basis
/// order.
pub fn ideal_hnf(ctx: &FieldContext, a: &IdealFactorization) -> Result<Vec<Vec<i128>>> {
    let n = ctx.degree;
    if a.norm > (1u128 << 60) {
        return Err(Error::CostGuard { what: "ideal norm".into(), size: a.norm.min(u64::MAX as u128) as u64, budget: 1 << 60 });
    }
    let mut cur: Vec<Vec<i128>> = (0..n)
        .map(|j| {
            let mut v = vec![0; n];
            v[j] = 1;
            v
        })
        .collect();
    let mut norm: i128 = 1;
    for (q, e) in &a.factors {
        let pl = prime_lattice(ctx, q);
        for _ in 0..*e {
            norm *= q.norm() as i128;
            cur = lattice_product(ctx, &cur, &pl, norm);
        }
    }
    debug_assert_eq!(lattice::hnf_det(&cur), norm);
    Ok(cur)
}

pub fn ideal_contains(h: &[Vec<i128>], e: &IntElement) -> bool {
    lattice::in_lattice(&e.coords, h)
}

/// `emb[j][k]` = `k`-th embedding of `α^j`.
pub fn embedding_matrix(ctx: &FieldContext) -> Vec<Vec<f64>> {
    let n = ctx.degree;
    (0..n)
        .map(|j| ctx.approx_embeddings.iter().map(|&r| r.powi(j as i32)).collect())
        .collect()
}

/// A generator of the principal ideal `a`, found by LLL reduction of the ideal
/// lattice and enumeration of short vectors with squared embedding length up
/// to `κ·n·N^{2/n}`, `κ = 4, 8, …, 64`.
pub fn find_generator(ctx: &FieldContext, a: &IdealFactorization) -> Result<IntElement> {
    let n = ctx.degree;
    if a.is_unit() {
        return Ok(Element::one(n));
    }
    let h = ideal_hnf(ctx, a)?;
    let emb = embedding_matrix(ctx);
    let red = lattice::lll(&h, &emb, 0.99);
    let target = a.norm as i128;
    let scale = (a.norm as f64).powf(2.0 / n as f64) * n as f64;
    let mut kappa = 4.0;
    while kappa <= 64.0 {
        let mut found: Option<Vec<i128>> = None;
        lattice::short_vectors(&red, &emb, kappa * scale, &mut |v| {
            let e = Element::new(v.to_vec());
            if ctx.norm(&e).abs() == target {
                found = Some(v.to_vec());
                true
            } else {
                false
            }
        });
        if let Some(v) = found {
            return Ok(Element::new(v));
        }
        kappa *= 2.0;
    }
    Err(Error::GeneratorNotFound { norm: a.norm.min(u64::MAX as u128) as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1() -> FieldContext {
        FieldContext::shanks_cubic(1).unwrap()
    }

    #[test]
    fn splitting_examples() {
        let k = k1();
        let s13 = split_prime(&k, 13).unwrap();
        let mut roots: Vec<u64> = s13.iter().map(|q| q.root.unwrap()).collect();
        assert_eq!(s13[0].root, Some(7));
        roots.sort();
        assert_eq!(roots, vec![7, 8, 10]);
        assert_eq!(s13[1].root, Some(10));
        let s7 = split_prime(&k, 7).unwrap();
        assert_eq!(s7, vec![PrimeIdealData { p: 7, position: 0, degree: 1, ramification: 3, root: Some(2) }]);
        let s2 = split_prime(&k, 2).unwrap();
        assert_eq!(s2.len(), 1);
        assert_eq!(s2[0].degree, 3);
    }

    #[test]
    fn residues() {
        let k = k1();
        let q = split_prime(&k, 13).unwrap()[0].clone();
        assert_eq!(residue_of(&Element::alpha(3), &q), 7);
        assert_eq!(residue_of(&Element::new(vec![7, 13, 0]), &q), 7);
        let sa = k.apply_automorphism(&Element::<i128>::alpha(3), 1);
        assert_eq!(residue_of(&sa, &q), 8);
    }

    #[test]
    fn enumeration_small() {
        let k = k1();
        let ps = enumerate_prime_ideals(&k, 13).unwrap();
        let norms: Vec<u128> = ps.iter().map(|q| q.norm()).collect();
        assert_eq!(norms, vec![7, 8, 13, 13, 13]);
        assert!(enumerate_prime_ideals(&k, 1).unwrap().is_empty());
    }

    #[test]
    fn chebotarev_density() {
        let k = k1();
        let count = enumerate_prime_ideals(&k, 10_000).unwrap().iter().filter(|q| q.degree == 1).count();
        let expect = 1229.0 * 3.0 / 3.0;
        assert!((count as f64 - expect).abs() / expect < 0.1, "{count}");
    }

    #[test]
    fn generators_roundtrip() {
        let k = k1();
        for q in enumerate_prime_ideals(&k, 500).unwrap() {
            let a = IdealFactorization::prime(&q);
            let g = find_generator(&k, &a).unwrap();
            assert_eq!(k.norm(&g).unsigned_abs(), q.norm());
            assert_eq!(factor_element(&k, &g).unwrap(), a);
        }
        let seven = Element::from_int(3, 7);
        let f = factor_element(&k, &seven).unwrap();
        assert_eq!(f.factors[0].1, 3);
        let g = find_generator(&k, &f).unwrap();
        assert_eq!(k.norm(&g).abs(), 343);
    }

    #[test]
    fn arithmetic_functions() {
        let k = k1();
        let ideals = enumerate_ideals(&k, 2000).unwrap();
        for a in &ideals {
            let divs = a.divisors();
            let mu: i32 = divs.iter().map(|d| d.moebius() as i32).sum();
            assert_eq!(mu, if a.is_unit() { 1 } else { 0 });
            // Σ_{𝔟|𝔞} Λ(𝔟) = log N𝔞 as a multiset identity
            let mut prod: u128 = 1;
            for d in &divs {
                if let Some(q) = d.mangoldt() {
                    prod *= q as u128;
                }
            }
            assert_eq!(prod, a.norm);
            assert_eq!(divs.len() as u64, a.tau());
        }
        assert_eq!(IdealFactorization::unit().moebius(), 1);
    }
}
