//! Explicit totally real cyclic fields and exact element arithmetic in the
//! power basis `1, α, …, α^{n-1}`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::interval::{self, RootEnclosure, MAX_BITS};
use crate::polymod;
use crate::scalar::{determinant, solve_rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldFamily {
    ShanksCubic(i64),
    LehmerQuintic(i64),
    RealQuadratic(i64),
}

impl fmt::Display for FieldFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldFamily::ShanksCubic(m) => write!(f, "shanks:{m}"),
            FieldFamily::LehmerQuintic(m) => write!(f, "lehmer:{m}"),
            FieldFamily::RealQuadratic(d) => write!(f, "quadratic:{d}"),
        }
    }
}

impl std::str::FromStr for FieldFamily {
    type Err = Error;

    /// Parses `shanks:M`, `lehmer:M` or `quadratic:D`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("field spec `{s}` needs family:param")))?;
        let v: i64 = param
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad field parameter `{param}`")))?;
        match name.trim() {
            "shanks" | "shanks_cubic" => Ok(FieldFamily::ShanksCubic(v)),
            "lehmer" | "lehmer_quintic" => Ok(FieldFamily::LehmerQuintic(v)),
            "quadratic" | "quad" | "real_quadratic" => Ok(FieldFamily::RealQuadratic(v)),
            other => Err(Error::InvalidParameter(format!("unknown field family `{other}`"))),
        }
    }
}

/// Field element as coordinates in the power basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> Element<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Element { coords }
    }

    pub fn zero(n: usize) -> Self {
        Element { coords: vec![T::zero(); n] }
    }

    pub fn one(n: usize) -> Self {
        Self::from_int(n, 1)
    }

    pub fn from_int(n: usize, v: i64) -> Self {
        let mut coords = vec![T::zero(); n];
        coords[0] = T::from_int(v);
        Element { coords }
    }

    /// The generator `α` of the power basis.
    pub fn alpha(n: usize) -> Self {
        let mut coords = vec![T::zero(); n];
        coords[1] = T::one();
        Element { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn to_rational(&self) -> Element<BigRational> {
        Element { coords: self.coords.iter().map(|c| c.to_rational()).collect() }
    }

    /// Convert to another scalar type, `None` if some coordinate does not fit.
    pub fn convert<U: Scalar>(&self) -> Option<Element<U>> {
        self.coords
            .iter()
            .map(|c| U::from_rational(&c.to_rational()))
            .collect::<Option<Vec<U>>>()
            .map(Element::new)
    }

    pub fn neg(&self) -> Self {
        Element { coords: self.coords.iter().map(|c| -c.clone()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Element { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Element { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        Element { coords: self.coords.iter().map(|a| a.clone() * c.clone()).collect() }
    }
}

impl Element<i128> {
    /// Coordinates reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: i128) -> Element<i128> {
        Element { coords: self.coords.iter().map(|c| c.rem_euclid(m)).collect() }
    }

    /// Content: gcd of the coordinates.
    pub fn content(&self) -> i128 {
        self.coords.iter().fold(0, |g, &c| arith::gcd_i128(g, c))
    }
}

impl<T: fmt::Display> fmt::Display for Element<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An explicit totally real cyclic field of prime degree (or degree 2).
///
/// Immutable after construction. Sign determination refines enclosures on
/// local copies, so a context can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct FieldContext {
    pub family: FieldFamily,
    pub degree: usize,
    /// Monic defining polynomial, little-endian, length `degree + 1`.
    pub defining_poly: Vec<i64>,
    pub poly_disc: BigInt,
    /// Field discriminant, known when the power basis is maximal.
    pub disc_field: Option<BigInt>,
    pub maximal_order_verified: bool,
    /// `automorphisms[k][j]` = coordinates of `σ^k(α^j)`.
    pub automorphisms: Vec<Vec<Vec<BigRational>>>,
    aut_int: Vec<Option<Vec<Vec<i128>>>>,
    /// `σ^k` sends embedding `i` to embedding `embedding_perm[k][i]`:
    /// `(σ^k x)^{(i)} = x^{(perm[k][i])}`.
    pub embedding_perm: Vec<Vec<usize>>,
    /// Root enclosures, decreasing.
    pub embeddings: Vec<RootEnclosure>,
    pub approx_embeddings: Vec<f64>,
    /// `-1` followed by multiplicative generators.
    pub unit_generators: Vec<Element<BigRational>>,
    pub class_number_assumption: u32,
    /// Power sums `Tr(α^k)` for `k < 2n - 1`.
    power_sums: Vec<i128>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl FieldContext {
    pub fn new(family: FieldFamily) -> Result<FieldContext> {
        match family {
            FieldFamily::ShanksCubic(m) => Self::shanks_cubic(m),
            FieldFamily::LehmerQuintic(m) => Self::lehmer_quintic(m),
            FieldFamily::RealQuadratic(d) => Self::real_quadratic(d),
        }
    }

    pub fn with_class_number(mut self, h: u32) -> FieldContext {
        self.class_number_assumption = h;
        self
    }

    pub fn shanks_cubic(m: i64) -> Result<FieldContext> {
        if m.abs() > 1_000_000 {
            return Err(Error::InvalidParameter(format!("|m| = {} too large", m.abs())));
        }
        let poly = vec![-1, m - 3, m, 1];
        let mut ctx = Self::skeleton(FieldFamily::ShanksCubic(poly[2]), poly)?;
        // σ(α) = -1/(1+α)
        let one_plus_alpha = Element::new(vec![rat(1), rat(1), rat(0)]);
        let sigma_alpha = ctx.inverse(&one_plus_alpha).neg();
        ctx.install_automorphism(&sigma_alpha)?;
        let c = m * m - 3 * m + 9;
        ctx.maximal_order_verified = arith::is_squarefree(c as u64);
        ctx.disc_field = ctx.maximal_order_verified.then(|| BigInt::from(c) * BigInt::from(c));
        let alpha = Element::<BigRational>::alpha(3);
        let sa = ctx.apply_automorphism(&alpha, 1);
        ctx.unit_generators = vec![Element::from_int(3, -1), alpha, sa];
        Ok(ctx)
    }

    pub fn lehmer_quintic(m: i64) -> Result<FieldContext> {
        if m.abs() > 1000 {
            return Err(Error::InvalidParameter(format!("|m| = {} too large", m.abs())));
        }
        let (m2, m3, m4) = (m * m, m * m * m, m * m * m * m);
        let poly = vec![
            1,
            m3 + 4 * m2 + 10 * m + 10,
            m4 + 5 * m3 + 11 * m2 + 15 * m + 5,
            -2 * (m3 + 3 * m2 + 5 * m + 5),
            m2,
            1,
        ];
        let mut ctx = Self::skeleton(FieldFamily::LehmerQuintic(m), poly)?;
        let sigma_alpha = ctx.discover_automorphism()?;
        ctx.install_automorphism(&sigma_alpha)?;
        ctx.maximal_order_verified = ctx.dedekind_maximal();
        ctx.disc_field = ctx.maximal_order_verified.then(|| ctx.poly_disc.clone());
        let beta = Element::<BigRational>::alpha(5);
        let mut gens = vec![Element::from_int(5, -1), beta.clone()];
        for k in 1..4 {
            gens.push(ctx.apply_automorphism(&beta, k));
        }
        ctx.unit_generators = gens;
        Ok(ctx)
    }

    pub fn real_quadratic(d: i64) -> Result<FieldContext> {
        if d < 2 || !arith::is_squarefree(d as u64) {
            return Err(Error::InvalidParameter(format!("d = {d} must be squarefree and at least 2")));
        }
        if d % 4 != 1 {
            return Err(Error::EvenDiscriminant { d });
        }
        let poly = vec![-(d - 1) / 4, -1, 1];
        let mut ctx = Self::skeleton(FieldFamily::RealQuadratic(d), poly)?;
        let sigma_alpha = Element::new(vec![rat(1), rat(-1)]);
        ctx.install_automorphism(&sigma_alpha)?;
        ctx.maximal_order_verified = true;
        ctx.disc_field = Some(BigInt::from(d));
        let (a, b, norm) = quadratic_fundamental_unit(d)?;
        if norm != -1 {
            return Err(Error::NormMinusOneUnitAbsent { d });
        }
        let eps = Element::new(vec![BigRational::from_integer(a), BigRational::from_integer(b)]);
        ctx.unit_generators = vec![Element::from_int(2, -1), eps];
        Ok(ctx)
    }

    fn skeleton(family: FieldFamily, poly: Vec<i64>) -> Result<FieldContext> {
        let n = poly.len() - 1;
        check_irreducible(&poly)?;
        let embeddings = interval::isolate_real_roots(&poly)?;
        let approx_embeddings = embeddings.iter().map(|e| e.midpoint_f64()).collect();
        let power_sums = newton_power_sums(&poly, 2 * n - 1);
        Ok(FieldContext {
            family,
            degree: n,
            poly_disc: poly_discriminant(&poly),
            defining_poly: poly,
            disc_field: None,
            maximal_order_verified: false,
            automorphisms: Vec::new(),
            aut_int: Vec::new(),
            embedding_perm: Vec::new(),
            embeddings,
            approx_embeddings,
            unit_generators: Vec::new(),
            class_number_assumption: 1,
            power_sums,
        })
    }

    /// Build all matrices from the image of `α` under `σ`, verifying
    /// `f(σα) = 0` and `σ^n = id` exactly.
    fn install_automorphism(&mut self, sigma_alpha: &Element<BigRational>) -> Result<()> {
        let n = self.degree;
        if !self.eval_poly_at(sigma_alpha).is_zero() {
            return Err(Error::IrreduciblePolyFailure("σ(α) is not a root".into()));
        }
        let mut images = vec![Element::<BigRational>::alpha(n)];
        for _ in 1..n {
            let prev = images.last().unwrap();
            images.push(self.compose_with(sigma_alpha, prev));
        }
        if self.compose_with(sigma_alpha, images.last().unwrap()) != Element::alpha(n) {
            return Err(Error::IrreduciblePolyFailure("σ^n is not the identity".into()));
        }
        self.automorphisms = images
            .iter()
            .map(|img| {
                let mut cols = vec![Element::<BigRational>::one(n)];
                for _ in 1..n {
                    let next = self.mul(cols.last().unwrap(), img);
                    cols.push(next);
                }
                cols.into_iter().map(|c| c.coords).collect()
            })
            .collect();
        self.aut_int = self
            .automorphisms
            .iter()
            .map(|mat| {
                mat.iter()
                    .map(|col| col.iter().map(i128::from_rational).collect::<Option<Vec<_>>>())
                    .collect::<Option<Vec<_>>>()
            })
            .collect();
        self.embedding_perm = images
            .iter()
            .map(|img| {
                (0..n)
                    .map(|i| {
                        let v = self.embed_f64(img)[i];
                        (0..n)
                            .min_by(|&a, &b| {
                                (self.approx_embeddings[a] - v)
                                    .abs()
                                    .partial_cmp(&(self.approx_embeddings[b] - v).abs())
                                    .unwrap()
                            })
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        Ok(())
    }

    /// `g(h)` where `g` is given in the power basis and `h` is the image of `α`.
    fn compose_with(&self, h: &Element<BigRational>, g: &Element<BigRational>) -> Element<BigRational> {
        let n = self.degree;
        let mut acc = Element::zero(n);
        for c in g.coords.iter().rev() {
            acc = self.mul(&acc, h);
            acc.coords[0] += c.clone();
        }
        acc
    }

    fn eval_poly_at(&self, e: &Element<BigRational>) -> Element<BigRational> {
        let coeffs: Vec<BigRational> = self.defining_poly.iter().map(|&c| rat(c)).collect();
        let n = self.degree;
        let mut acc = Element::zero(n);
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, e);
            acc.coords[0] += c.clone();
        }
        acc
    }

    /// Find `σ` numerically: interpolate `α ↦ α'` over every 5-cycle of the
    /// real roots, reconstruct rational coefficients and verify exactly.
    /// Among the nontrivial automorphisms the one sending the largest root to
    /// the earliest other root is returned.
    fn discover_automorphism(&self) -> Result<Element<BigRational>> {
        let n = self.degree;
        let bits = 640;
        let roots: Vec<BigRational> = self
            .embeddings
            .iter()
            .map(|e| {
                let r = e.refine_to(&self.defining_poly, bits);
                (r.lo_rational() + r.hi_rational()) / rat(2)
            })
            .collect();
        let vander: Vec<Vec<BigRational>> = roots
            .iter()
            .map(|r| {
                let mut row = vec![BigRational::one()];
                for _ in 1..n {
                    let next = row.last().unwrap() * r;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut found: Vec<(usize, Element<BigRational>)> = Vec::new();
        for perm in cyclic_permutations(n) {
            let target: Vec<BigRational> = perm.iter().map(|&j| roots[j].clone()).collect();
            let Some(approx) = solve_rational(&vander, &target) else { continue };
            let Some(coords) = approx.iter().map(|c| reconstruct_rational(c, 1u64 << 40)).collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let cand = Element::new(coords);
            if self.eval_poly_at(&cand).is_zero() {
                found.push((perm[0], cand));
            }
        }
        found.sort_by_key(|(t, _)| *t);
        found
            .into_iter()
            .next()
            .map(|(_, e)| e)
            .ok_or_else(|| Error::IrreduciblePolyFailure("no cyclic automorphism found".into()))
    }

    /// Dedekind criterion at every prime whose square divides the polynomial
    /// discriminant.
    pub fn dedekind_maximal(&self) -> bool {
        let Some(d) = self.poly_disc.abs().to_u128() else { return false };
        if d == 0 {
            return false;
        }
        arith::factorize_u128(d)
            .into_iter()
            .filter(|&(_, e)| e >= 2)
            .all(|(p, _)| p <= u64::MAX as u128 && dedekind_at(&self.defining_poly, p as u64))
    }

    pub fn n(&self) -> usize {
        self.degree
    }

    // ---- arithmetic ----

    pub fn mul<T: Scalar>(&self, a: &Element<T>, b: &Element<T>) -> Element<T> {
        let n = self.degree;
        let mut prod = vec![T::zero(); 2 * n - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                prod[i + j] = prod[i + j].clone() + x.clone() * y.clone();
            }
        }
        for d in (n..2 * n - 1).rev() {
            let c = std::mem::replace(&mut prod[d], T::zero());
            if c.is_zero() {
                continue;
            }
            for i in 0..n {
                let pc = self.defining_poly[i];
                if pc != 0 {
                    prod[d - n + i] = prod[d - n + i].clone() - c.clone() * T::from_int(pc);
                }
            }
        }
        prod.truncate(n);
        Element { coords: prod }
    }

    pub fn pow<T: Scalar>(&self, a: &Element<T>, mut e: u32) -> Element<T> {
        let mut base = a.clone();
        let mut acc = Element::one(self.degree);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Matrix of multiplication by `e`: column `j` holds `e·α^j`.
    pub fn mul_matrix<T: Scalar>(&self, e: &Element<T>) -> Vec<Vec<T>> {
        let n = self.degree;
        let mut cols = vec![e.clone()];
        for _ in 1..n {
            let prev = cols.last().unwrap();
            cols.push(self.mul(prev, &Element::alpha(n)));
        }
        (0..n).map(|i| (0..n).map(|j| cols[j].coords[i].clone()).collect()).collect()
    }

    pub fn norm<T: Scalar>(&self, e: &Element<T>) -> T {
        determinant(self.mul_matrix(e))
    }

    pub fn trace<T: Scalar>(&self, e: &Element<T>) -> T {
        e.coords
            .iter()
            .zip(&self.power_sums)
            .fold(T::zero(), |acc, (c, &s)| acc + c.clone() * T::from_rational(&BigRational::from_integer(s.into())).unwrap())
    }

    /// `Tr(a·b)` via the trace form, without forming the product.
    pub fn trace_product(&self, a: &Element<i128>, b: &Element<i128>) -> i128 {
        let mut acc = 0i128;
        for (i, x) in a.coords.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                acc += x * y * self.power_sums[i + j];
            }
        }
        acc
    }

    /// `Tr(α^k)`, `k < 2n - 1`.
    pub fn power_sum(&self, k: usize) -> i128 {
        self.power_sums[k]
    }

    pub fn inverse(&self, e: &Element<BigRational>) -> Element<BigRational> {
        let m = self.mul_matrix(e);
        let mut rhs = vec![BigRational::zero(); self.degree];
        rhs[0] = BigRational::one();
        Element::new(solve_rational(&m, &rhs).expect("nonzero element is invertible"))
    }

    /// Inverse of an integral element whose inverse is integral (e.g. a unit).
    pub fn inverse_int(&self, e: &Element<i128>) -> Option<Element<i128>> {
        self.inverse(&e.to_rational()).convert()
    }

    /// `σ^k(e)`.
    pub fn apply_automorphism<T: Scalar>(&self, e: &Element<T>, k: usize) -> Element<T> {
        self.try_apply_automorphism(e, k).expect("automorphism image not representable in scalar type")
    }

    pub fn try_apply_automorphism<T: Scalar>(&self, e: &Element<T>, k: usize) -> Option<Element<T>> {
        let n = self.degree;
        let k = k % n;
        if k == 0 {
            return Some(e.clone());
        }
        if let Some(mat) = &self.aut_int[k] {
            let mut out = vec![T::zero(); n];
            for (j, c) in e.coords.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for i in 0..n {
                    let v = mat[j][i];
                    if v != 0 {
                        out[i] = out[i].clone() + c.clone() * T::from_rational(&BigRational::from_integer(v.into()))?;
                    }
                }
            }
            return Some(Element::new(out));
        }
        let mat = &self.automorphisms[k];
        let mut out = vec![BigRational::zero(); n];
        for (j, c) in e.coords.iter().enumerate() {
            let c = c.to_rational();
            for i in 0..n {
                out[i] += &c * &mat[j][i];
            }
        }
        out.iter().map(T::from_rational).collect::<Option<Vec<_>>>().map(Element::new)
    }

    /// True when every automorphism maps integral power-basis elements to
    /// integral ones.
    pub fn automorphisms_integral(&self) -> bool {
        self.aut_int.iter().all(|m| m.is_some())
    }

    // ---- embeddings ----

    pub fn embed_f64<T: Scalar>(&self, e: &Element<T>) -> Vec<f64> {
        let coeffs: Vec<f64> = e.coords.iter().map(|c| c.approx_f64()).collect();
        self.approx_embeddings
            .iter()
            .map(|&x| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c))
            .collect()
    }

    /// Sign of `e` at embedding `i`, certified.
    pub fn sign_at<T: Scalar>(&self, e: &Element<T>, i: usize) -> Result<Ordering> {
        let coeffs: Vec<f64> = e.coords.iter().map(|c| c.approx_f64()).collect();
        let encl = &self.embeddings[i];
        if coeffs.iter().all(|c| c.is_finite()) {
            if let Some(s) = interval::sign_f64(&coeffs, encl.midpoint_f64(), encl.radius_f64()) {
                return Ok(s);
            }
        }
        if e.is_zero() {
            return Ok(Ordering::Equal);
        }
        // clear denominators, then certified interval evaluation
        let rats: Vec<BigRational> = e.coords.iter().map(|c| c.to_rational()).collect();
        let den = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = rats.iter().map(|r| (r * BigRational::from_integer(den.clone())).to_integer()).collect();
        let mut bits = encl.bits;
        loop {
            let refined = encl.refine_to(&self.defining_poly, bits);
            if let Some(s) = interval::sign_on_enclosure(&ints, &refined) {
                return Ok(s);
            }
            if bits >= MAX_BITS {
                return Err(Error::PrecisionExhausted { bits });
            }
            bits = (bits * 2).min(MAX_BITS);
        }
    }

    /// Signs at every embedding as `+1` / `-1`.
    pub fn sign_vector<T: Scalar>(&self, e: &Element<T>) -> Result<Vec<i8>> {
        if e.is_zero() {
            return Err(Error::InvalidParameter("sign of zero".into()));
        }
        (0..self.degree)
            .map(|i| {
                self.sign_at(e, i).and_then(|s| match s {
                    Ordering::Greater => Ok(1),
                    Ordering::Less => Ok(-1),
                    Ordering::Equal => Err(Error::InvalidParameter("element vanishes at an embedding".into())),
                })
            })
            .collect()
    }

    pub fn is_totally_positive<T: Scalar>(&self, e: &Element<T>) -> Result<bool> {
        Ok(self.sign_vector(e)?.iter().all(|&s| s > 0))
    }

    /// Integral unit generators, when they are integral in the power basis.
    pub fn integral_unit_generators(&self) -> Option<Vec<Element<i128>>> {
        self.unit_generators.iter().map(|u| u.convert()).collect()
    }
}

fn newton_power_sums(poly: &[i64], count: usize) -> Vec<i128> {
    let n = poly.len() - 1;
    // a_{n-i} = poly[n-i]
    let mut s: Vec<i128> = vec![n as i128];
    for k in 1..count {
        let mut v: i128 = 0;
        for i in 1..=n.min(k) {
            let a = poly[n - i] as i128;
            if i == k {
                v -= k as i128 * a;
            } else {
                v -= a * s[k - i];
            }
        }
        s.push(v);
    }
    s
}

/// `disc(f) = (-1)^{n(n-1)/2} Res(f, f')` for monic `f`.
pub fn poly_discriminant(poly: &[i64]) -> BigInt {
    let n = poly.len() - 1;
    let f: Vec<BigInt> = poly.iter().rev().map(|&c| BigInt::from(c)).collect();
    let fd: Vec<BigInt> = poly
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .map(|(i, &c)| BigInt::from(c) * BigInt::from(i))
        .collect();
    // Sylvester matrix of f (deg n) and f' (deg n-1): size 2n-1
    let size = 2 * n - 1;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n - 1 {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in f.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in fd.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    let res = determinant(rows);
    if (n * (n - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

/// Irreducibility certificate: no rational root and some prime modulo which the
/// polynomial is irreducible. Cyclic fields of prime degree always have such
/// (inert) primes.
fn check_irreducible(poly: &[i64]) -> Result<()> {
    let n = poly.len() - 1;
    let c0 = poly[0].unsigned_abs();
    if c0 == 0 {
        return Err(Error::IrreduciblePolyFailure("zero constant term".into()));
    }
    if n >= 2 {
        for d in divisors(c0) {
            for r in [d as i64, -(d as i64)] {
                let v = poly.iter().rev().fold(0i128, |acc, &c| acc * r as i128 + c as i128);
                if v == 0 {
                    return Err(Error::IrreduciblePolyFailure(format!("rational root {r}")));
                }
            }
        }
    }
    if n <= 3 {
        return Ok(());
    }
    for p in arith::primes_up_to(2000) {
        let fp = polymod::from_ints(poly, p);
        if polymod::degree(&fp) == Some(n) && polymod::is_irreducible(&fp, p) {
            return Ok(());
        }
    }
    Err(Error::IrreduciblePolyFailure("no prime certifies irreducibility".into()))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
        if d > 1_000_000 {
            break;
        }
    }
    out
}

/// Dedekind criterion for `Z[α]` being `p`-maximal.
pub fn dedekind_at(poly: &[i64], p: u64) -> bool {
    let fp = polymod::from_ints(poly, p);
    let factors = polymod::factor(&fp, p);
    // g = product of distinct irreducible factors, h = f / g (mod p)
    let mut g = vec![1u64];
    for (irr, _) in &factors {
        g = polymod::mul(&g, irr, p);
    }
    let h = polymod::divrem(&fp, &g, p).0;
    // integer lifts (coefficients in [0,p)) and F = (f - g h)/p
    let gi: Vec<i128> = g.iter().map(|&c| c as i128).collect();
    let hi: Vec<i128> = h.iter().map(|&c| c as i128).collect();
    let mut gh = vec![0i128; gi.len() + hi.len() - 1];
    for (i, a) in gi.iter().enumerate() {
        for (j, b) in hi.iter().enumerate() {
            gh[i + j] += a * b;
        }
    }
    let len = poly.len().max(gh.len());
    let f_big: Vec<i64> = (0..len)
        .map(|i| {
            let diff = poly.get(i).copied().unwrap_or(0) as i128 - gh.get(i).copied().unwrap_or(0);
            debug_assert_eq!(diff % p as i128, 0);
            (diff / p as i128) as i64
        })
        .collect();
    let fbar = polymod::from_ints(&f_big, p);
    let common = polymod::gcd(&polymod::gcd(&fbar, &g, p), &h, p);
    polymod::degree(&common).unwrap_or(0) == 0
}

/// All cyclic permutations `π` of `{0..n}` given as the image list `[π(0), …]`,
/// consisting of one `n`-cycle. Only prime `n` is needed here.
fn cyclic_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let rest: Vec<usize> = (1..n).collect();
    permute(&rest, &mut Vec::new(), &mut |order: &[usize]| {
        // cycle 0 -> order[0] -> order[1] -> ... -> 0
        let mut img = vec![0usize; n];
        let mut cur = 0;
        for &next in order {
            img[cur] = next;
            cur = next;
        }
        img[cur] = 0;
        out.push(img);
    });
    out
}

fn permute(rest: &[usize], prefix: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if rest.is_empty() {
        visit(prefix);
        return;
    }
    for i in 0..rest.len() {
        let mut r = rest.to_vec();
        let x = r.remove(i);
        prefix.push(x);
        permute(&r, prefix, visit);
        prefix.pop();
    }
}

/// Best rational approximation by continued fractions, accepted only when it
/// matches `x` to well beyond the denominator size.
fn reconstruct_rational(x: &BigRational, max_den: u64) -> Option<BigRational> {
    let tol = BigRational::new(BigInt::one(), BigInt::one() << 200usize);
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut y = x.clone();
    for _ in 0..200 {
        let a = y.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > BigInt::from(max_den) {
            return None;
        }
        let approx = BigRational::new(p2.clone(), q2.clone());
        if (&approx - x).abs() < tol {
            return Some(approx);
        }
        let frac = &y - BigRational::from_integer(a);
        if frac.is_zero() {
            return Some(approx);
        }
        y = frac.recip();
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Fundamental unit of `Z[(1+√d)/2]`, `d ≡ 1 (mod 4)`, as `(a, b, norm)` with
/// `ε = a + b ω`, from the continued fraction of `ω = (1 + √d)/2`.
pub fn quadratic_fundamental_unit(d: i64) -> Result<(BigInt, BigInt, i32)> {
    let c = (d - 1) / 4;
    let sq = arith::isqrt(d as u64) as i64;
    // ω = (P + √d)/Q
    let (mut pp, mut qq) = (1i64, 2i64);
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    for _ in 0..100_000 {
        let a = (pp + sq).div_euclid(qq);
        let p2 = BigInt::from(a) * &p1 + &p0;
        let q2 = BigInt::from(a) * &q1 + &q0;
        // N(p - q ω̄) = p² - p q - c q²
        let nrm = &p2 * &p2 - &p2 * &q2 - BigInt::from(c) * &q2 * &q2;
        if nrm.abs().is_one() {
            let sign = if nrm.is_positive() { 1 } else { -1 };
            return Ok((&p2 - &q2, q2, sign));
        }
        let pn = a * qq - pp;
        let qn = (d - pn * pn) / qq;
        pp = pn;
        qq = qn;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    Err(Error::SearchBoundExceeded(format!("fundamental unit of Q(sqrt {d})")))
}
