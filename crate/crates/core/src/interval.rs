//! Certified real root enclosures with dyadic endpoints.
//!
//! An enclosure `[lo, hi] / 2^bits` is certified by a strict sign change of the
//! defining polynomial at its endpoints. When a degree `n` polynomial has `n`
//! pairwise disjoint certified enclosures, each contains exactly one root.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const INITIAL_BITS: u32 = 64;
pub const MAX_BITS: u32 = 8192;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootEnclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

/// Sign of `poly(a / 2^bits)` for integer coefficients (little-endian).
pub fn sign_at_dyadic(poly: &[i64], a: &BigInt, bits: u32) -> Ordering {
    // poly(a/2^b) * 2^(b*deg) = sum c_i a^i 2^(b(deg-i))
    let deg = poly.len() - 1;
    let mut acc = BigInt::from(poly[deg]);
    for i in (0..deg).rev() {
        acc = acc * a + (BigInt::from(poly[i]) << (bits as usize * (deg - i)));
    }
    acc.sign_cmp()
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl RootEnclosure {
    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.bits as usize)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.bits as usize)
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid: BigInt = (&self.lo + &self.hi) >> 1usize;
        dyadic_to_f64(&mid, self.bits)
    }

    pub fn radius_f64(&self) -> f64 {
        dyadic_to_f64(&(&self.hi - &self.lo), self.bits) / 2.0 + f64::EPSILON * self.midpoint_f64().abs()
    }

    /// True when the endpoints still bracket a sign change of `poly`.
    pub fn is_certified(&self, poly: &[i64]) -> bool {
        let a = sign_at_dyadic(poly, &self.lo, self.bits);
        let b = sign_at_dyadic(poly, &self.hi, self.bits);
        self.lo < self.hi && a != Ordering::Equal && b != Ordering::Equal && a != b
    }

    /// Bisect until the enclosure has width `2^-bits`. Requires `bits >= self.bits`
    /// and that `poly` has no dyadic rational root (true for irreducible polys of
    /// degree at least 2).
    pub fn refine_to(&self, poly: &[i64], bits: u32) -> RootEnclosure {
        assert!(bits >= self.bits);
        let shift = (bits - self.bits) as usize;
        let mut lo = &self.lo << shift;
        let mut hi = &self.hi << shift;
        let lo_sign = sign_at_dyadic(poly, &lo, bits);
        let one = BigInt::one();
        while &hi - &lo > one {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            let s = sign_at_dyadic(poly, &mid, bits);
            if s == Ordering::Equal {
                // only possible for a dyadic root; collapse onto it
                lo = mid.clone() - 1;
                hi = mid + 1;
                break;
            }
            if s == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        RootEnclosure { lo, hi, bits }
    }
}

pub fn dyadic_to_f64(a: &BigInt, bits: u32) -> f64 {
    let len = a.bits() as i64;
    if len <= 1000 {
        let v = a.to_f64().unwrap_or(f64::NAN);
        return v * (-(bits as f64)).exp2();
    }
    let drop = (len - 60) as usize;
    let top = (a >> drop).to_f64().unwrap_or(f64::NAN);
    top * ((drop as f64) - bits as f64).exp2()
}

fn rational_to_dyadic_floor(x: f64, bits: u32) -> BigInt {
    let scaled = x * (bits as f64).exp2();
    BigInt::from(scaled.floor() as i128)
}

fn eval_f64(poly: &[f64], x: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Approximate real roots of a polynomial all of whose roots are real and simple,
/// ascending. Works by recursion on the derivative: consecutive critical points
/// bracket at most one root.
pub fn approx_real_roots(poly: &[f64]) -> Vec<f64> {
    let deg = poly.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![-poly[0] / poly[1]];
    }
    let deriv: Vec<f64> = poly.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect();
    let crit = approx_real_roots(&deriv);
    let lead = poly[deg];
    let bound = 1.0 + poly[..deg].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut points = vec![-bound];
    points.extend(crit.iter().copied().filter(|c| c.abs() < bound));
    points.push(bound);
    let mut roots = Vec::new();
    for w in points.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (eval_f64(poly, a), eval_f64(poly, b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = eval_f64(poly, m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots.dedup();
    roots
}

/// Certified enclosures of all real roots of a squarefree, totally real, monic
/// integer polynomial, sorted by decreasing value, at [`INITIAL_BITS`] bits.
pub fn isolate_real_roots(poly: &[i64]) -> Result<Vec<RootEnclosure>> {
    let deg = poly.len() - 1;
    let fpoly: Vec<f64> = poly.iter().map(|&c| c as f64).collect();
    let mut approx = approx_real_roots(&fpoly);
    if approx.len() != deg {
        return Err(Error::IrreduciblePolyFailure(format!(
            "expected {deg} real roots, located {}",
            approx.len()
        )));
    }
    approx.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let bits = INITIAL_BITS;
    for exp in [24i32, 32, 40, 46] {
        let encl: Vec<RootEnclosure> = approx
            .iter()
            .map(|&r| {
                let w = (-(exp as f64)).exp2() * r.abs().max(1.0);
                RootEnclosure {
                    lo: rational_to_dyadic_floor(r - w, bits),
                    hi: rational_to_dyadic_floor(r + w, bits) + 1,
                    bits,
                }
            })
            .collect();
        let disjoint = encl.windows(2).all(|w| w[1].hi < w[0].lo);
        if disjoint && encl.iter().all(|e| e.is_certified(poly)) {
            return Ok(encl.iter().map(|e| e.refine_to(poly, bits)).collect());
        }
    }
    Err(Error::PrecisionExhausted { bits })
}

/// Exact integer interval `[lo, hi]`.
#[derive(Debug, Clone)]
struct IntInterval {
    lo: BigInt,
    hi: BigInt,
}

impl IntInterval {
    fn point(v: BigInt) -> Self {
        IntInterval { lo: v.clone(), hi: v }
    }

    fn mul(&self, other: &IntInterval) -> IntInterval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        IntInterval { lo, hi }
    }

    fn add(&self, other: &IntInterval) -> IntInterval {
        IntInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }
}

/// Sign of `sum c_i x^i` for all `x` in the enclosure, if it is constant.
/// Integer coefficients; the enclosure is expressed at scale `2^bits`.
pub fn sign_on_enclosure(coeffs: &[BigInt], encl: &RootEnclosure) -> Option<Ordering> {
    let n = coeffs.len();
    if n == 0 {
        return Some(Ordering::Equal);
    }
    let b = encl.bits as usize;
    let x = IntInterval { lo: encl.lo.clone(), hi: encl.hi.clone() };
    // Horner over integers: value * 2^(b(n-1)) = sum c_i X^i 2^(b(n-1-i))
    let mut acc = IntInterval::point(coeffs[n - 1].clone());
    for i in (0..n - 1).rev() {
        acc = acc.mul(&x).add(&IntInterval::point(&coeffs[i] << (b * (n - 1 - i))));
    }
    if acc.lo.is_positive() {
        Some(Ordering::Greater)
    } else if acc.hi.is_negative() {
        Some(Ordering::Less)
    } else if acc.lo.is_zero() && acc.hi.is_zero() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

/// Fast sign test in floating point with a conservative error bound. Returns
/// `None` when the bound does not separate the value from zero.
pub fn sign_f64(coeffs: &[f64], mid: f64, rad: f64) -> Option<Ordering> {
    let m = mid.abs() + rad;
    let mut value = 0.0;
    let mut bound = 0.0;
    let mut pow = 1.0f64;
    for (i, &c) in coeffs.iter().enumerate() {
        value += c * mid.powi(i as i32);
        let deriv_bound = if i == 0 { 0.0 } else { i as f64 * m.powi(i as i32 - 1) };
        bound += c.abs() * (deriv_bound * rad + 8.0 * (coeffs.len() as f64) * f64::EPSILON * pow);
        pow *= m;
    }
    if !value.is_finite() || !bound.is_finite() {
        return None;
    }
    if value > 2.0 * bound {
        Some(Ordering::Greater)
    } else if value < -2.0 * bound {
        Some(Ordering::Less)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_cubic_enclosures() {
        let f = [-1i64, -2, 1, 1];
        let roots = isolate_real_roots(&f).unwrap();
        assert_eq!(roots.len(), 3);
        let mids: Vec<f64> = roots.iter().map(|r| r.midpoint_f64()).collect();
        // 2cos(2pi/7), 2cos(4pi/7), 2cos(6pi/7)
        let pi = std::f64::consts::PI;
        let expect = [2.0 * (2.0 * pi / 7.0).cos(), 2.0 * (4.0 * pi / 7.0).cos(), 2.0 * (6.0 * pi / 7.0).cos()];
        for (m, e) in mids.iter().zip(expect) {
            assert!((m - e).abs() < 1e-15);
        }
        for r in &roots {
            assert!(r.is_certified(&f));
            assert_eq!(&r.hi - &r.lo, BigInt::one());
            let finer = r.refine_to(&f, 256);
            assert!(finer.is_certified(&f));
            assert!(finer.lo_rational() >= r.lo_rational() && finer.hi_rational() <= r.hi_rational());
        }
    }

    #[test]
    fn interval_sign_of_linear_form() {
        let f = [-2i64, 0, 1];
        let roots = isolate_real_roots(&f).unwrap();
        // x - 1 at sqrt 2 is positive, at -sqrt 2 negative
        let c = [BigInt::from(-1), BigInt::from(1)];
        assert_eq!(sign_on_enclosure(&c, &roots[0]), Some(Ordering::Greater));
        assert_eq!(sign_on_enclosure(&c, &roots[1]), Some(Ordering::Less));
    }
}
