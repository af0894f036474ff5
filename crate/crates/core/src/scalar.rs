use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Coordinate ring for field elements.
///
/// Everything in [`crate::field`] only needs exact ring operations, so the same
/// code runs over machine integers, big integers and big rationals.
pub trait Scalar:
    Clone + Debug + PartialEq + Eq + Hash + Ord + Send + Sync + Num + Signed + FromPrimitive + 'static
{
    fn to_rational(&self) -> BigRational;

    /// `None` when `r` is not representable (non-integral for integer scalars,
    /// or out of range).
    fn from_rational(r: &BigRational) -> Option<Self>;

    fn approx_f64(&self) -> f64;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("i64 fits every scalar")
    }
}

impl Scalar for i64 {
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(*self))
    }
    fn from_rational(r: &BigRational) -> Option<Self> {
        if r.is_integer() {
            r.to_integer().to_i64()
        } else {
            None
        }
    }
    fn approx_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for i128 {
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(*self))
    }
    fn from_rational(r: &BigRational) -> Option<Self> {
        if r.is_integer() {
            r.to_integer().to_i128()
        } else {
            None
        }
    }
    fn approx_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for BigInt {
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }
    fn from_rational(r: &BigRational) -> Option<Self> {
        r.is_integer().then(|| r.to_integer())
    }
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn from_rational(r: &BigRational) -> Option<Self> {
        Some(r.clone())
    }
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Fraction-free (Bareiss) determinant. Exact for any [`Scalar`].
pub fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v / prev.clone();
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Solve `m x = b` over the rationals. `None` if `m` is singular.
pub fn solve_rational(m: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(piv, col);
        let inv = BigRational::one() / a[col][col].clone();
        for j in col..=n {
            a[col][j] = a[col][j].clone() * inv.clone();
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in col..=n {
                    let v = a[col][j].clone() * factor.clone();
                    a[i][j] = a[i][j].clone() - v;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}
