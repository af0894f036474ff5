//! Prime spin sums, congruence sums, bilinear forms, the exact Vaughan-type
//! decomposition over ideals, and short character-sum scans.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldContext;
use crate::ideals::{self, IdealFactorization};
use crate::spin::{SpinEngine, SpinFilters};
use crate::symbols::{self, DirichletChar};
use crate::units::SquareImage;

/// `constant + Σ_p coeffs[p] · log p`, exact with integer coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LogCombination {
    pub constant: i128,
    pub coeffs: BTreeMap<u64, i128>,
}

impl LogCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn integer(c: i128) -> Self {
        LogCombination { constant: c, coeffs: BTreeMap::new() }
    }

    /// `log N𝔞`.
    pub fn log_norm(a: &IdealFactorization) -> Self {
        let mut out = Self::zero();
        for (q, e) in &a.factors {
            *out.coeffs.entry(q.p).or_insert(0) += (q.degree * e) as i128;
        }
        out
    }

    /// `Λ(𝔞)`: `f log p` on powers of a prime of norm `p^f`, zero otherwise.
    pub fn mangoldt(a: &IdealFactorization) -> Self {
        match a.factors.as_slice() {
            [(q, _)] => {
                let mut out = Self::zero();
                out.coeffs.insert(q.p, q.degree as i128);
                out
            }
            _ => Self::zero(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: i128) {
        if c == 0 {
            return;
        }
        self.constant += c * other.constant;
        for (&p, &v) in &other.coeffs {
            *self.coeffs.entry(p).or_insert(0) += c * v;
        }
        self.normalize();
    }

    pub fn scaled(&self, c: i128) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1);
        out
    }

    fn normalize(&mut self) {
        self.coeffs.retain(|_, v| *v != 0);
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.coeffs.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.constant as f64 + self.coeffs.iter().map(|(&p, &c)| c as f64 * (p as f64).ln()).sum::<f64>()
    }
}

impl fmt::Display for LogCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (p, c) in &self.coeffs {
            write!(f, " {:+}*log({p})", c)?;
        }
        Ok(())
    }
}

/// A sequence `a_𝔫 ∈ {-1, 0, 1}` indexed by integral ideals.
pub trait IdealSequence: Sync {
    fn value(&self, a: &IdealFactorization) -> Result<i8>;
}

/// `a_𝔫 = r(𝔫) spin(σ^k, 𝔫)` on odd ideals, `0` on even ones, where `r` is the
/// indicator of the configured generator congruence classes.
pub struct SpinSequence<'a> {
    pub engine: &'a SpinEngine,
    pub k: usize,
    pub filters: SpinFilters,
    image: Option<SquareImage>,
}

impl<'a> SpinSequence<'a> {
    pub fn new(engine: &'a SpinEngine, k: usize, filters: SpinFilters) -> Self {
        let image = filters.square_image(&engine.ctx, &engine.units);
        SpinSequence { engine, k, filters, image }
    }
}

impl IdealSequence for SpinSequence<'_> {
    fn value(&self, a: &IdealFactorization) -> Result<i8> {
        if !a.is_odd() {
            return Ok(0);
        }
        let e = self.engine;
        let g = e.canonical_generator(a)?;
        if self.filters.matching_representative(&e.ctx, &e.units, &g, self.image.as_ref()).is_none() {
            return Ok(0);
        }
        e.spin_with_generator(&g, a, self.k)
    }
}

/// Values drawn uniformly from `{-1, 0, 1}`, fixed per ideal by a seed and the
/// ideal's position in the norm-ordered enumeration.
pub struct TableSequence {
    pub values: HashMap<IdealFactorization, i8>,
}

impl TableSequence {
    pub fn random(ideals: &[IdealFactorization], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = ideals.iter().map(|a| (a.clone(), rng.gen_range(-1i8..=1))).collect();
        TableSequence { values }
    }

    pub fn constant(ideals: &[IdealFactorization], c: i8) -> Self {
        TableSequence { values: ideals.iter().map(|a| (a.clone(), c)).collect() }
    }
}

impl IdealSequence for TableSequence {
    fn value(&self, a: &IdealFactorization) -> Result<i8> {
        self.values.get(a).copied().ok_or_else(|| Error::InvalidParameter(format!("ideal of norm {} outside the table", a.norm)))
    }
}

/// `a_𝔫` for all listed ideals, evaluated in parallel.
pub fn tabulate(seq: &dyn IdealSequence, ideals: &[IdealFactorization]) -> Result<HashMap<IdealFactorization, i8>> {
    let vals: Vec<Result<i8>> = ideals.par_iter().map(|a| seq.value(a)).collect();
    ideals.iter().cloned().zip(vals).map(|(a, v)| v.map(|v| (a, v))).collect()
}

pub const IDEAL_BUDGET: u64 = 10_000_000;

fn guard_norm(x: u64) -> Result<()> {
    if x > IDEAL_BUDGET {
        return Err(Error::CostGuard { what: "ideal enumeration bound".into(), size: x, budget: IDEAL_BUDGET });
    }
    Ok(())
}

// ---- prime spin sums ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSum {
    pub sum: i64,
    pub prime_count: u64,
    /// `Σ spin(𝔭) log N𝔭`.
    pub weighted: LogCombination,
    pub generator_failures: usize,
}

/// Sum of `spin(σ^k, 𝔭)` over the primes of the filtered stream.
pub fn spin_sum(engine: &SpinEngine, x: u64, k: usize, filters: &SpinFilters) -> Result<SpinSum> {
    if k == 0 || k >= engine.n() {
        return Err(Error::InvalidParameter(format!("automorphism power {k}")));
    }
    let stream = engine.spin_prime_stream(x, filters)?;
    let mut out = SpinSum { sum: 0, prime_count: 0, weighted: LogCombination::zero(), generator_failures: stream.generator_failures.len() };
    for r in &stream.records {
        let s = r.spin(k) as i128;
        out.sum += s as i64;
        out.prime_count += 1;
        out.weighted.add_scaled(&LogCombination::log_norm(&IdealFactorization::prime(&r.prime)), s);
    }
    Ok(out)
}

// ---- congruence sums ----

/// `A_𝔡(x) = Σ_{N𝔫 ≤ x, 𝔡 | 𝔫} a_𝔫`, requiring `𝔡` odd and coprime to its
/// nontrivial conjugates and to `f`.
pub fn congruence_sum(ctx: &FieldContext, seq: &dyn IdealSequence, d: &IdealFactorization, f: &IdealFactorization, x: u64) -> Result<i64> {
    congruence_sum_range(ctx, seq, d, f, 0, x)
}

/// The part of `A_𝔡` with `lo < N𝔫 ≤ hi`.
pub fn congruence_sum_range(
    ctx: &FieldContext,
    seq: &dyn IdealSequence,
    d: &IdealFactorization,
    f: &IdealFactorization,
    lo: u64,
    hi: u64,
) -> Result<i64> {
    guard_norm(hi)?;
    if !d.is_odd() {
        return Err(Error::HypothesisViolated("modulus must be odd".into()));
    }
    for k in 1..ctx.degree {
        if !d.is_coprime(&ideals::conjugate_ideal(ctx, d, k)?) {
            return Err(Error::HypothesisViolated("modulus not coprime to its conjugate".into()));
        }
    }
    if !d.is_coprime(f) {
        return Err(Error::HypothesisViolated("modulus not coprime to F".into()));
    }
    let dn = d.norm as u64;
    let cofactors = ideals::enumerate_ideals(ctx, hi / dn)?;
    let terms: Vec<Result<i64>> = cofactors
        .par_iter()
        .filter(|c| c.norm * dn as u128 > lo as u128)
        .map(|c| seq.value(&c.mul(d)).map(|v| v as i64))
        .collect();
    terms.into_iter().sum()
}

// ---- bilinear forms ----

pub const BILINEAR_BUDGET: u64 = 100_000_000;

/// `B(M, N) = Σ_{N𝔪 ≤ M} Σ_{N𝔫 ≤ N} v_𝔪 w_𝔫 a_{𝔪𝔫}`, organised by the product
/// `𝔨 = 𝔪𝔫` and its divisors.
pub fn bilinear_form(
    ctx: &FieldContext,
    seq: &dyn IdealSequence,
    m: u64,
    n: u64,
    v: &(dyn Fn(&IdealFactorization) -> LogCombination + Sync),
    w: &(dyn Fn(&IdealFactorization) -> i64 + Sync),
) -> Result<LogCombination> {
    let mn = m.checked_mul(n).unwrap_or(u64::MAX);
    if mn > BILINEAR_BUDGET {
        return Err(Error::CostGuard { what: "bilinear form grid".into(), size: mn, budget: BILINEAR_BUDGET });
    }
    let all = ideals::enumerate_ideals(ctx, mn)?;
    let parts: Vec<Result<LogCombination>> = all
        .par_iter()
        .map(|kk| {
            let mut acc = LogCombination::zero();
            let mut a_val: Option<i8> = None;
            for dm in kk.divisors() {
                if dm.norm > m as u128 || kk.norm / dm.norm > n as u128 {
                    continue;
                }
                let dn = kk.div(&dm).expect("divisor");
                let wv = w(&dn) as i128;
                if wv == 0 {
                    continue;
                }
                let a = match a_val {
                    Some(a) => a,
                    None => {
                        let a = seq.value(kk)?;
                        a_val = Some(a);
                        a
                    }
                };
                if a != 0 {
                    acc.add_scaled(&v(&dm), wv * a as i128);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = LogCombination::zero();
    for p in parts {
        total.add_scaled(&p?, 1);
    }
    Ok(total)
}

// ---- Vaughan decomposition ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VaughanReport {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub s_x: LogCombination,
    pub s_z: LogCombination,
    pub s1: LogCombination,
    pub s2: LogCombination,
    pub s3: LogCombination,
    pub exact_identity_holds: bool,
}

/// All `(y, z)` with `yz = x` and `z ≥ y ≥ 2`.
pub fn vaughan_splits(x: u64) -> Vec<(u64, u64)> {
    (2..).take_while(|y| y * y <= x).filter(|y| x % y == 0).map(|y| (y, x / y)).collect()
}

/// Sequence values for every ideal of norm at most `x`, as needed by
/// [`vaughan_verify_table`].
pub fn vaughan_table(ctx: &FieldContext, seq: &dyn IdealSequence, x: u64) -> Result<(Vec<IdealFactorization>, HashMap<IdealFactorization, i8>)> {
    guard_norm(x)?;
    let all = ideals::enumerate_ideals(ctx, x)?;
    let table = tabulate(seq, &all)?;
    Ok((all, table))
}

pub fn vaughan_verify(ctx: &FieldContext, seq: &dyn IdealSequence, x: u64, y: u64, z: u64) -> Result<VaughanReport> {
    let (all, table) = vaughan_table(ctx, seq, x)?;
    vaughan_verify_table(&all, &table, x, y, z)
}

/// Computes `S(x)`, `S(z)`, `S₁`, `S₂`, `S₃` independently from their defining
/// sums and compares `S(x) − S(z)` with `S₁ − S₂ − S₃` as formal combinations.
pub fn vaughan_verify_table(
    all: &[IdealFactorization],
    table: &HashMap<IdealFactorization, i8>,
    x: u64,
    y: u64,
    z: u64,
) -> Result<VaughanReport> {
    if y < 2 || z < y || y.checked_mul(z) != Some(x) {
        return Err(Error::InvalidParameter(format!("need x = yz with z >= y >= 2, got x={x} y={y} z={z}")));
    }
    let a = |n: &IdealFactorization| -> i128 { table[n] as i128 };
    let upto = |b: u64| all.iter().take_while(move |i| i.norm <= b as u128);

    let s_of = |b: u64| {
        let mut s = LogCombination::zero();
        for n in upto(b) {
            s.add_scaled(&LogCombination::mangoldt(n), a(n));
        }
        s
    };
    let s_x = s_of(x);
    let s_z = s_of(z);

    let squarefree: Vec<&IdealFactorization> = upto(y).filter(|m| m.is_squarefree()).collect();
    let prime_powers = |lo: u64, hi: u64| {
        all.iter().filter(move |i| i.norm > lo as u128 && i.norm <= hi as u128 && i.mangoldt().is_some())
    };

    // S₁ = Σ_{N𝔪 ≤ y} μ(𝔪) Σ_{𝔪 | 𝔫, N𝔫 ≤ x} a_𝔫 log N(𝔫/𝔪)
    let mut s1 = LogCombination::zero();
    for m in &squarefree {
        let mu = m.moebius() as i128;
        for c in upto(x / m.norm as u64) {
            let av = a(&c.mul(m));
            if av != 0 {
                s1.add_scaled(&LogCombination::log_norm(c), mu * av);
            }
        }
    }

    // S₂ = Σ_𝔡 c_𝔡 A_𝔡(x), c_𝔡 = Σ_{𝔞𝔪 = 𝔡, N𝔞 ≤ y, N𝔪 ≤ y} μ(𝔪) Λ(𝔞)
    let mut coeff: BTreeMap<IdealFactorization, LogCombination> = BTreeMap::new();
    for aa in prime_powers(1, y) {
        let lam = LogCombination::mangoldt(aa);
        for m in &squarefree {
            coeff.entry(aa.mul(m)).or_default().add_scaled(&lam, m.moebius() as i128);
        }
    }
    let mut s2 = LogCombination::zero();
    for (d, c) in &coeff {
        if d.norm > x as u128 || c.is_zero() {
            continue;
        }
        let ad: i128 = upto(x / d.norm as u64).map(|l| a(&l.mul(d))).sum();
        s2.add_scaled(c, ad);
    }

    // S₃ = Σ_{N(𝔩𝔞𝔪) ≤ x, y < N𝔞 ≤ z, N𝔪 ≤ y} μ(𝔪) Λ(𝔞) a_{𝔩𝔞𝔪}
    let mut s3 = LogCombination::zero();
    for aa in prime_powers(y, z) {
        let lam = LogCombination::mangoldt(aa);
        for m in &squarefree {
            let am = aa.mul(m);
            if am.norm > x as u128 {
                continue;
            }
            let inner: i128 = upto(x / am.norm as u64).map(|l| a(&l.mul(&am))).sum();
            s3.add_scaled(&lam, m.moebius() as i128 * inner);
        }
    }

    let lhs = s_x.sub(&s_z);
    let rhs = s1.sub(&s2).sub(&s3);
    Ok(VaughanReport { x, y, z, exact_identity_holds: lhs == rhs, s_x, s_z, s1, s2, s3 })
}

// ---- character sums ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowMax {
    pub max_abs: i64,
    pub argmax: u64,
}

/// `max_M |S_χ(M, N)|` over `M ∈ [m_lo, m_hi)` with
/// `S_χ(M, N) = Σ_{M < n ≤ M + N, n ≡ ℓ (mod k)} χ(n)`, by sliding the window
/// one step at a time. The first maximising `M` is reported.
pub fn char_sum_scan(chi: &DirichletChar, n: u64, m_lo: u64, m_hi: u64, progression: Option<(u64, u64)>) -> Result<WindowMax> {
    if n == 0 || m_hi <= m_lo {
        return Err(Error::InvalidParameter("empty window or range".into()));
    }
    if let Some((k, _)) = progression {
        if k == 0 || crate::arith::gcd(k, chi.modulus) != 1 {
            return Err(Error::InvalidParameter("progression modulus must be coprime to q".into()));
        }
    }
    let term = |t: u64| -> i64 {
        match progression {
            Some((k, l)) if t % k != l % k => 0,
            _ => chi.eval((t % chi.modulus) as i64) as i64,
        }
    };
    let mut s: i64 = (m_lo + 1..=m_lo + n).map(term).sum();
    let mut best = WindowMax { max_abs: s.abs(), argmax: m_lo };
    for m in m_lo + 1..m_hi {
        s += term(m + n) - term(m);
        if s.abs() > best.max_abs {
            best = WindowMax { max_abs: s.abs(), argmax: m };
        }
    }
    Ok(best)
}

/// Direct evaluation of one window, the oracle for [`char_sum_scan`].
pub fn char_sum_direct(chi: &DirichletChar, m: u64, n: u64) -> i64 {
    (m + 1..=m + n).map(|t| chi.eval((t % chi.modulus) as i64) as i64).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurgessRow {
    pub q: u64,
    /// Rational primes carrying an odd total exponent (they determine `χ_𝔮`).
    pub odd_support: Vec<u64>,
    pub window: u64,
    pub max_abs: i64,
    pub argmax: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurgessReport {
    pub rows: Vec<BurgessRow>,
    pub max_ratio: f64,
    pub argmax_q: u64,
    pub principal_skipped: usize,
}

/// For every odd ideal of norm `q ≤ q_max` supported on degree-one primes with
/// `χ_𝔮` nonprincipal, `max_M |S_χ(M, N)| / (N^{5/6} q^{7/144})` with
/// `N = ⌈q^{1/3}⌉` and `M` over one period. Ideals inducing the same character
/// are scanned once.
pub fn burgess_scan(ctx: &FieldContext, q_max: u64) -> Result<BurgessReport> {
    guard_norm(q_max)?;
    let all = ideals::enumerate_ideals(ctx, q_max)?;
    let mut chars: BTreeMap<(u64, Vec<u64>), IdealFactorization> = BTreeMap::new();
    let mut principal_skipped = 0;
    for a in all {
        if a.is_unit() || !a.is_odd() || a.factors.iter().any(|(q, _)| q.degree != 1) {
            continue;
        }
        let mut parity: BTreeMap<u64, u32> = BTreeMap::new();
        for (q, e) in &a.factors {
            *parity.entry(q.p).or_insert(0) += q.degree * e;
        }
        let odd: Vec<u64> = parity.into_iter().filter(|(_, e)| e % 2 == 1).map(|(p, _)| p).collect();
        if odd.is_empty() {
            principal_skipped += 1;
            continue;
        }
        chars.entry((a.norm as u64, odd)).or_insert(a);
    }
    let keys: Vec<(&(u64, Vec<u64>), &IdealFactorization)> = chars.iter().collect();
    let rows: Vec<Result<BurgessRow>> = keys
        .par_iter()
        .map(|((q, odd), a)| {
            let chi = symbols::dirichlet_char(a)?;
            debug_assert!(!chi.is_principal());
            let window = ceil_cbrt(*q);
            let w = char_sum_scan(&chi, window, 0, *q, None)?;
            let ratio = w.max_abs as f64 / ((window as f64).powf(5.0 / 6.0) * (*q as f64).powf(7.0 / 144.0));
            Ok(BurgessRow { q: *q, odd_support: odd.clone(), window, max_abs: w.max_abs, argmax: w.argmax, ratio })
        })
        .collect();
    let rows: Vec<BurgessRow> = rows.into_iter().collect::<Result<_>>()?;
    let (max_ratio, argmax_q) = rows.iter().fold((0.0, 0), |(m, q), r| if r.ratio > m { (r.ratio, r.q) } else { (m, q) });
    Ok(BurgessReport { rows, max_ratio, argmax_q, principal_skipped })
}

fn ceil_cbrt(q: u64) -> u64 {
    let r = crate::arith::iroot(q, 3);
    if r * r * r == q {
        r
    } else {
        r + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1() -> FieldContext {
        FieldContext::shanks_cubic(1).unwrap()
    }

    #[test]
    fn log_combination_arithmetic() {
        let k = k1();
        let q = ideals::split_prime(&k, 13).unwrap()[0].clone();
        let sq = IdealFactorization::prime_power(&q, 2);
        assert_eq!(LogCombination::mangoldt(&sq), LogCombination::log_norm(&IdealFactorization::prime(&q)));
        assert_eq!(LogCombination::log_norm(&sq).coeffs[&13], 2);
        assert!(LogCombination::log_norm(&sq).sub(&LogCombination::log_norm(&sq)).is_zero());
        let two = ideals::split_prime(&k, 2).unwrap()[0].clone();
        assert_eq!(LogCombination::mangoldt(&IdealFactorization::prime(&two)).coeffs[&2], 3);
    }

    #[test]
    fn mangoldt_partial_sums() {
        let k = k1();
        for a in ideals::enumerate_ideals(&k, 2000).unwrap() {
            let mut s = LogCombination::zero();
            for b in a.divisors() {
                s.add_scaled(&LogCombination::mangoldt(&b), 1);
            }
            assert_eq!(s, LogCombination::log_norm(&a));
        }
    }

    #[test]
    fn vaughan_all_ones_small() {
        let k = k1();
        let all = ideals::enumerate_ideals(&k, 100).unwrap();
        let seq = TableSequence::constant(&all, 1);
        let r = vaughan_verify(&k, &seq, 100, 4, 25).unwrap();
        assert!(r.exact_identity_holds, "{r:?}");
        // no prime ideal has norm at most 4, so S₂ vanishes here
        assert!(r.s2.is_zero());
        let all = ideals::enumerate_ideals(&k, 400).unwrap();
        let seq = TableSequence::random(&all, 7);
        let r = vaughan_verify(&k, &seq, 400, 10, 40).unwrap();
        assert!(r.exact_identity_holds);
        assert!(!r.s1.is_zero() && !r.s2.is_zero() && !r.s3.is_zero());
        assert_ne!(r.s_x.sub(&r.s_z), r.s1.sub(&r.s2));
    }

    #[test]
    fn splits_of_400() {
        assert_eq!(vaughan_splits(400), vec![(2, 200), (4, 100), (5, 80), (8, 50), (10, 40), (16, 25), (20, 20)]);
    }

    #[test]
    fn sliding_window_matches_direct() {
        let k = k1();
        let q = IdealFactorization::prime(&ideals::split_prime(&k, 13).unwrap()[0]);
        let chi = symbols::dirichlet_char(&q).unwrap();
        for n in 1..6 {
            let w = char_sum_scan(&chi, n, 0, 13, None).unwrap();
            let direct = (0..13).map(|m| char_sum_direct(&chi, m, n).abs()).max().unwrap();
            assert_eq!(w.max_abs, direct);
        }
        assert_eq!(char_sum_direct(&chi, 0, 13), 0);
        // squares mod 13 include 3, 4 and 9, 10: a run of three equal values exists
        let w3 = char_sum_scan(&chi, 3, 0, 13, None).unwrap();
        let run = (0..13u64).any(|m| (1..=3).all(|t| chi.eval((m + t) as i64) == chi.eval((m + 1) as i64) && chi.eval((m + t) as i64) != 0));
        assert_eq!(w3.max_abs == 3, run);
    }

    #[test]
    fn bilinear_zero_weights() {
        let k = k1();
        let all = ideals::enumerate_ideals(&k, 100).unwrap();
        let seq = TableSequence::constant(&all, 1);
        let b = bilinear_form(&k, &seq, 10, 10, &|_| LogCombination::zero(), &|a| a.tau() as i64).unwrap();
        assert!(b.is_zero());
    }
}
