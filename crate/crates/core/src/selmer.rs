//! Selmer dimension predictions for quadratic twists `E^{(p)}` of a curve whose
//! 2-division field is a cyclic cubic field of class number one.

use rayon::prelude::*;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{Element, FieldContext};
use crate::ideals;
use crate::spin::{SpinEngine, SpinFilters};
use crate::IntElement;

/// `y² = x³ + a2 x² + a4 x + a6` together with its 2-division field.
#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub a2: i64,
    pub a4: i64,
    pub a6: i64,
    pub conductor: u64,
    pub base_dim: u32,
    /// A root of `x³ + a2 x² + a4 x + a6` in the configured field.
    pub root_in_field: IntElement,
    /// Bad primes unramified in `K`, together with 2.
    pub sigma: Vec<u64>,
    pub class_number_1: bool,
    /// Whether "p splits completely in Q(E[4])" follows from the mod-8
    /// generator condition (known for the default curve); otherwise the
    /// predictions are conditional.
    pub e4_from_ray_class: bool,
}

impl CurveConfig {
    /// The conductor-784 curve `y² = x³ + x² − 16x − 29` over the cubic
    /// subfield of `Q(μ₇)`.
    pub fn curve_784(ctx: &FieldContext) -> Result<CurveConfig> {
        let mut cfg = CurveConfig::new(ctx, 1, -16, -29, 784, 1)?;
        cfg.e4_from_ray_class = true;
        Ok(cfg)
    }

    /// Verifies that the 2-division cubic has a root in `ctx` (so both cubic
    /// fields coincide) and derives `Σ`.
    pub fn new(ctx: &FieldContext, a2: i64, a4: i64, a6: i64, conductor: u64, base_dim: u32) -> Result<CurveConfig> {
        if ctx.degree != 3 {
            return Err(Error::InvalidParameter("the 2-division field must be cubic".into()));
        }
        let root = find_cubic_root(ctx, [a6, a4, a2], 12)
            .ok_or_else(|| Error::HypothesisViolated("2-division cubic has no small root in the configured field".into()))?;
        let disc = ctx.disc_field.clone().unwrap_or_else(|| ctx.poly_disc.clone());
        let mut sigma: Vec<u64> = arith::factorize(conductor)
            .into_iter()
            .map(|(p, _)| p)
            .filter(|&p| (&disc % num_bigint::BigInt::from(p)) != num_bigint::BigInt::from(0))
            .collect();
        sigma.push(2);
        sigma.sort_unstable();
        sigma.dedup();
        Ok(CurveConfig {
            a2,
            a4,
            a6,
            conductor,
            base_dim,
            root_in_field: root,
            sigma,
            class_number_1: ctx.class_number_assumption == 1,
            e4_from_ray_class: false,
        })
    }

    /// `f(θ) = 0` exactly for the recorded root.
    pub fn link_holds(&self, ctx: &FieldContext) -> bool {
        eval_cubic(ctx, [self.a6, self.a4, self.a2], &self.root_in_field).is_zero()
    }
}

fn eval_cubic(ctx: &FieldContext, c: [i64; 3], x: &IntElement) -> IntElement {
    let n = ctx.degree;
    let mut acc = Element::<i128>::one(n);
    for &ci in c.iter().rev() {
        acc = ctx.mul(&acc, x).add(&Element::from_int(n, ci));
    }
    acc
}

/// A root of `x³ + c2 x² + c1 x + c0` in `O` with coordinates bounded by `b`.
fn find_cubic_root(ctx: &FieldContext, c: [i64; 3], b: i128) -> Option<IntElement> {
    let n = ctx.degree;
    let side = (2 * b + 1) as usize;
    (0..side.pow(n as u32)).find_map(|idx| {
        let mut t = idx;
        let coords: Vec<i128> = (0..n)
            .map(|_| {
                let v = (t % side) as i128 - b;
                t /= side;
                v
            })
            .collect();
        let x = Element::new(coords);
        eval_cubic(ctx, c, &x).is_zero().then_some(x)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    NotSplit,
    NoGeneratorOneMod8,
    GeneratorNotFound,
}

impl FailureReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureReason::NotSplit => "not_split",
            FailureReason::NoGeneratorOneMod8 => "no_generator_1_mod_8",
            FailureReason::GeneratorNotFound => "generator_not_found",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistCandidate {
    pub p: u64,
    pub splits_completely: bool,
    pub tp_generator_1_mod_8: bool,
    /// Generator of the position-0 prime above `p`, `≡ 1 mod 8`.
    pub generator: Option<IntElement>,
    /// `spin(σ, 𝔭)` for the three primes above `p`.
    pub spins: Vec<i8>,
    pub spin: Option<i8>,
    pub predicted_dim: Option<u32>,
    pub failure: Option<FailureReason>,
}

impl TwistCandidate {
    pub fn qualified(&self) -> bool {
        self.failure.is_none()
    }

    pub fn prime_independent(&self) -> bool {
        self.spins.windows(2).all(|w| w[0] == w[1])
    }
}

/// `base_dim + 2` if the spin is `+1`, `base_dim` if it is `-1`.
pub fn predict_selmer_dim(cfg: &CurveConfig, c: &TwistCandidate) -> Result<u32> {
    if !c.splits_completely || !c.tp_generator_1_mod_8 || !cfg.class_number_1 {
        return Err(Error::HypothesisViolated(format!("p = {} does not satisfy the twist hypotheses", c.p)));
    }
    match c.spin {
        Some(1) => Ok(cfg.base_dim + 2),
        Some(-1) => Ok(cfg.base_dim),
        _ => Err(Error::HypothesisViolated(format!("spin at p = {} is not ±1", c.p))),
    }
}

/// Every odd prime `p ≤ x`, qualified or not, ascending.
pub fn scan_twist_candidates(cfg: &CurveConfig, engine: &SpinEngine, x: u64) -> Result<Vec<TwistCandidate>> {
    if !cfg.link_holds(&engine.ctx) {
        return Err(Error::HypothesisViolated("curve is not linked to the configured field".into()));
    }
    let filters = SpinFilters { degree_one_only: true, mod8: Some(vec![1, 0, 0]), mod_m: None };
    let image = filters.square_image(&engine.ctx, &engine.units);
    let primes: Vec<u64> = arith::guarded_primes(x)?.into_iter().filter(|&p| p > 2).collect();
    let out: Vec<Result<TwistCandidate>> = primes
        .par_iter()
        .map(|&p| {
            let mut c = TwistCandidate {
                p,
                splits_completely: false,
                tp_generator_1_mod_8: false,
                generator: None,
                spins: Vec::new(),
                spin: None,
                predicted_dim: None,
                failure: None,
            };
            let above = ideals::degree_one_primes(&engine.ctx, p)?;
            if above.len() != engine.n() || !above[0].is_split() {
                c.failure = Some(FailureReason::NotSplit);
                return Ok(c);
            }
            c.splits_completely = true;
            let scan = engine.prime_records(p, u64::MAX, &filters, image.as_ref())?;
            if !scan.generator_failures.is_empty() {
                c.failure = Some(FailureReason::GeneratorNotFound);
                return Ok(c);
            }
            if scan.records.is_empty() {
                c.failure = Some(FailureReason::NoGeneratorOneMod8);
                return Ok(c);
            }
            c.tp_generator_1_mod_8 = true;
            c.spins = scan.records.iter().map(|r| r.spin(1)).collect();
            c.spin = Some(c.spins[0]);
            c.generator = Some(scan.records[0].generator.clone());
            c.predicted_dim = Some(predict_selmer_dim(cfg, &c)?);
            Ok(c)
        })
        .collect();
    out.into_iter().collect()
}
