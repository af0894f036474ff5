//! Unit signs, totally positive associates and the fundamental domain for the
//! action of totally positive units on `R_+^n`.
//!
//! The domain is `D = {x ≻ 0 : u·x > e·x for all u ∈ U⁺, u ≠ 1}`. For an
//! integral `α ≻ 0` the condition reads `Tr(uα) > Tr(α)`, so membership,
//! reduction and counting are all exact integer computations on traces.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Element, FieldContext};
use crate::ideals::{self, IdealFactorization};
use crate::lattice;
use crate::IntElement;

/// Sign data for `⟨-1, ε_1, …, ε_{n-1}⟩`.
#[derive(Debug, Clone)]
pub struct UnitGroupData {
    /// `-1` first, then the multiplicative generators.
    pub generators: Vec<IntElement>,
    pub inverses: Vec<IntElement>,
    /// Row `i`: sign vector of generator `i` over `F_2` (`-` ↦ 1).
    pub sign_matrix: Vec<Vec<u8>>,
    /// Residues modulo 8 (coordinates in `[0, 8)`) of the group generated by
    /// the squares of the generators.
    pub mod8_square_image: Vec<Vec<i128>>,
    /// `log |ε_i^{(k)}|` for the multiplicative generators.
    pub log_embeddings: Vec<Vec<f64>>,
    sign_table: Vec<Option<Vec<u8>>>,
}

pub fn sign_mask(signs: &[i8]) -> usize {
    signs.iter().enumerate().filter(|(_, &s)| s < 0).fold(0, |m, (i, _)| m | (1 << i))
}

impl UnitGroupData {
    pub fn new(ctx: &FieldContext) -> Result<UnitGroupData> {
        let n = ctx.degree;
        let generators = ctx
            .integral_unit_generators()
            .ok_or_else(|| Error::Unsupported("unit generators are not integral in the power basis".into()))?;
        let inverses = generators
            .iter()
            .map(|u| ctx.inverse_int(u))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Unsupported("unit inverse is not integral".into()))?;
        let mut sign_matrix = Vec::new();
        for g in &generators {
            let s = ctx.sign_vector(g)?;
            sign_matrix.push(s.iter().map(|&x| u8::from(x < 0)).collect::<Vec<u8>>());
        }
        // table: sign mask -> subset of generators realising it (smallest subset index)
        let gcount = generators.len();
        let mut sign_table: Vec<Option<Vec<u8>>> = vec![None; 1 << n];
        for subset in 0u32..(1 << gcount) {
            let mut mask = 0usize;
            for i in 0..gcount {
                if subset >> i & 1 == 1 {
                    let row_mask = sign_matrix[i].iter().enumerate().fold(0, |m, (k, &b)| m | ((b as usize) << k));
                    mask ^= row_mask;
                }
            }
            if sign_table[mask].is_none() {
                sign_table[mask] = Some((0..gcount).map(|i| (subset >> i & 1) as u8).collect());
            }
        }
        let log_embeddings = generators[1..]
            .iter()
            .map(|g| ctx.embed_f64(g).iter().map(|x| x.abs().ln()).collect())
            .collect();
        let mut ug = UnitGroupData {
            generators,
            inverses,
            sign_matrix,
            mod8_square_image: Vec::new(),
            log_embeddings,
            sign_table,
        };
        let img = square_image(ctx, &ug, 8);
        ug.mod8_square_image = img.residues();
        Ok(ug)
    }

    pub fn rank(&self) -> usize {
        self.generators.len() - 1
    }

    /// `∏ ε_i^{e_i}` over the multiplicative generators (exponents may be negative).
    pub fn unit_from_exponents(&self, ctx: &FieldContext, exps: &[i32]) -> IntElement {
        let mut acc = Element::one(ctx.degree);
        for (i, &e) in exps.iter().enumerate() {
            let base = if e >= 0 { &self.generators[i + 1] } else { &self.inverses[i + 1] };
            if e != 0 {
                acc = ctx.mul(&acc, &ctx.pow(base, e.unsigned_abs()));
            }
        }
        acc
    }

    /// A unit associate of `e` that is totally positive.
    pub fn make_totally_positive(&self, ctx: &FieldContext, e: &IntElement) -> Result<IntElement> {
        let mask = sign_mask(&ctx.sign_vector(e)?);
        let subset = self.sign_table[mask].as_ref().ok_or(Error::SignSystemSingular)?;
        let mut out = e.clone();
        for (i, &b) in subset.iter().enumerate() {
            if b == 1 {
                out = ctx.mul(&out, &self.generators[i]);
            }
        }
        Ok(out)
    }

    pub fn signs_span(&self) -> bool {
        self.sign_table.iter().all(|s| s.is_some())
    }
}

/// Image of the group of unit squares in `(O/mO)^×`, with an exponent vector
/// (over the multiplicative generators) for each residue.
#[derive(Debug, Clone)]
pub struct SquareImage {
    pub modulus: i128,
    pub elements: Vec<(Vec<i128>, Vec<i32>)>,
}

impl SquareImage {
    pub fn residues(&self) -> Vec<Vec<i128>> {
        let mut r: Vec<Vec<i128>> = self.elements.iter().map(|(r, _)| r.clone()).collect();
        r.sort();
        r
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Breadth-first closure of `{1}` under multiplication by `ε_i^{±2}` modulo `m`.
pub fn square_image(ctx: &FieldContext, ug: &UnitGroupData, m: i128) -> SquareImage {
    let n = ctx.degree;
    let r = ug.rank();
    let mut moves: Vec<(IntElement, Vec<i32>)> = Vec::new();
    for i in 0..r {
        let sq = ctx.mul(&ug.generators[i + 1], &ug.generators[i + 1]).reduce_mod(m);
        let isq = ctx.mul(&ug.inverses[i + 1], &ug.inverses[i + 1]).reduce_mod(m);
        let mut e = vec![0; r];
        e[i] = 2;
        moves.push((sq, e.clone()));
        e[i] = -2;
        moves.push((isq, e));
    }
    let start = Element::<i128>::one(n).reduce_mod(m);
    let mut seen: HashMap<Vec<i128>, Vec<i32>> = HashMap::new();
    let mut order = Vec::new();
    seen.insert(start.coords.clone(), vec![0; r]);
    order.push(start.coords.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        let ex = seen[&x.coords].clone();
        for (mv, de) in &moves {
            let y = ctx.mul(&x, mv).reduce_mod(m);
            if !seen.contains_key(&y.coords) {
                let ey: Vec<i32> = ex.iter().zip(de).map(|(a, b)| a + b).collect();
                seen.insert(y.coords.clone(), ey);
                order.push(y.coords.clone());
                queue.push_back(y);
            }
        }
    }
    let elements = order.into_iter().map(|k| {
        let e = seen[&k].clone();
        (k, e)
    });
    SquareImage { modulus: m, elements: elements.collect() }
}

/// Outcome of the sign-surjectivity test behind `U⁺ = U²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSignReport {
    pub mixed_sign_generator: bool,
    pub sign_rank: usize,
    pub degree: usize,
    pub passed: bool,
}

/// Check that some generator has mixed signs and that the sign vectors of
/// `-1` and the generators span `F_2^n`.
pub fn verify_unit_plus_square(ctx: &FieldContext) -> Result<UnitSignReport> {
    let vectors = ctx
        .unit_generators
        .iter()
        .map(|u| ctx.sign_vector(u))
        .collect::<Result<Vec<_>>>()?;
    Ok(verify_sign_vectors(&vectors, ctx.degree))
}

pub fn verify_sign_vectors(vectors: &[Vec<i8>], n: usize) -> UnitSignReport {
    let mixed = vectors.iter().any(|v| v.iter().any(|&s| s > 0) && v.iter().any(|&s| s < 0));
    let rows: Vec<u64> = vectors.iter().map(|v| sign_mask(v) as u64).collect();
    let rank = f2_rank(rows);
    UnitSignReport { mixed_sign_generator: mixed, sign_rank: rank, degree: n, passed: mixed && rank == n }
}

fn f2_rank(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let Some(pos) = rows.iter().position(|&r| r >> bit & 1 == 1) else { continue };
        let pivot = rows.swap_remove(pos);
        for r in rows.iter_mut() {
            if *r >> bit & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

// ---- fundamental domain ----

#[derive(Debug, Clone)]
pub struct SmallUnit {
    pub element: IntElement,
    pub exponents: Vec<i32>,
    pub trace: i128,
    pub embeddings: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FundamentalDomain {
    pub contracting_unit: IntElement,
    pub contracting_exponents: Vec<i32>,
    /// The constant `C`, rounded up to a rational.
    pub c: BigRational,
    /// `Ũ = {u ∈ U⁺ : u ≠ 1, u ≺ C}`.
    pub small_units: Vec<SmallUnit>,
    /// Descent moves: `Ũ` together with the inverses of its elements.
    moves: Vec<IntElement>,
    /// Vertices of the slice `{x ∈ D̄ : Σ x_k = 1}`.
    pub slice_vertices: Vec<Vec<f64>>,
    /// Embeddings of elements of `D̄` lie in `[c1·N^{1/n}, c2·N^{1/n}]`.
    pub size_constants: (f64, f64),
    pub degree: usize,
}

/// Search `∏ ε_i^{2a_i}`, `|a_i| ≤ bound`, for a unit with `n - 1` embeddings at
/// most `1/2`, minimising the remaining embedding.
pub fn find_contracting_unit(ctx: &FieldContext, ug: &UnitGroupData, bound: i32) -> Result<(IntElement, Vec<i32>)> {
    let n = ctx.degree;
    let r = ug.rank();
    let half = -(2f64.ln());
    let mut best: Option<(f64, Vec<i32>)> = None;
    for a in exponent_box(&vec![bound; r]) {
        if a.iter().all(|&x| x == 0) {
            continue;
        }
        let logs: Vec<f64> = (0..n).map(|k| (0..r).map(|i| 2.0 * a[i] as f64 * ug.log_embeddings[i][k]).sum()).collect();
        let small = logs.iter().filter(|&&l| l <= half + 1e-9).count();
        if small < n - 1 {
            continue;
        }
        let big = logs.iter().cloned().fold(f64::MIN, f64::max);
        let better = match &best {
            None => true,
            Some((b, ea)) => big < b - 1e-9 || ((big - b).abs() <= 1e-9 && a < *ea),
        };
        if better {
            // certify the n - 1 small embeddings exactly before accepting
            let exps: Vec<i32> = a.iter().map(|x| 2 * x).collect();
            let u = ug.unit_from_exponents(ctx, &exps);
            if certify_at_most_half(ctx, &u, n)? {
                best = Some((big, a));
            }
        }
    }
    let (_, a) = best.ok_or_else(|| Error::SearchBoundExceeded(format!("no contracting unit with exponents ≤ {bound}")))?;
    let exps: Vec<i32> = a.iter().map(|x| 2 * x).collect();
    Ok((ug.unit_from_exponents(ctx, &exps), exps))
}

fn certify_at_most_half(ctx: &FieldContext, u: &IntElement, n: usize) -> Result<bool> {
    // sign of 1 - 2u at each embedding
    let one = Element::<i128>::one(n);
    let d = one.sub(&u.scale(&2));
    let mut small = 0;
    for k in 0..n {
        if ctx.sign_at(&d, k)? != std::cmp::Ordering::Less {
            small += 1;
        }
    }
    Ok(small >= n - 1)
}

fn exponent_box(bounds: &[i32]) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        let mut next = Vec::with_capacity(out.len() * (2 * b as usize + 1));
        for v in &out {
            for x in -b..=b {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Build the domain with the default contracting-unit search bound and no
/// extra slack on the `Ũ` exponent box.
pub fn build_domain(ctx: &FieldContext, ug: &UnitGroupData) -> Result<FundamentalDomain> {
    build_domain_with_slack(ctx, ug, 0)
}

/// As [`build_domain`], enlarging the exponent box for `Ũ` by `slack` in every
/// direction (used to test completeness of the enumeration).
pub fn build_domain_with_slack(ctx: &FieldContext, ug: &UnitGroupData, slack: i32) -> Result<FundamentalDomain> {
    let n = ctx.degree;
    let r = ug.rank();
    let (u, u_exps) = find_contracting_unit(ctx, ug, 20)?;
    let emb = ctx.embed_f64(&u);
    // rows: the conjugate of u whose large embedding sits at index k
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); n];
    for s in 0..n {
        let perm = &ctx.embedding_perm[s];
        let row: Vec<f64> = (0..n).map(|l| emb[perm[l]]).collect();
        let big = (0..n).max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap()).unwrap();
        rows[big] = row;
    }
    if rows.iter().any(|r| r.is_empty()) {
        return Err(Error::SearchBoundExceeded("conjugates of the contracting unit do not cover all embeddings".into()));
    }
    let mut cmax = 0.0f64;
    for k in 0..n {
        for l in 0..n {
            if k != l {
                cmax = cmax.max((rows[k][k] - 1.0) / (1.0 - rows[k][l]));
            }
        }
    }
    let c_val = 1.0 + cmax;
    let c = BigRational::new(BigInt::from((c_val * 1000.0).ceil() as i64 + 1), BigInt::from(1000));
    let c_f = c.to_f64().unwrap();
    let log_c = c_f.ln();

    // exponent box from |log u^{(k)}| ≤ (n-1) log C on the first n-1 embeddings
    let bound = (n as f64 - 1.0) * log_c;
    let reg: Vec<Vec<f64>> = (0..r).map(|i| (0..r).map(|k| 2.0 * ug.log_embeddings[i][k]).collect()).collect();
    let inv = invert_f64(&reg).ok_or(Error::SearchBoundExceeded("singular regulator matrix".into()))?;
    let box_bounds: Vec<i32> = (0..r)
        .map(|i| ((0..r).map(|k| inv[k][i].abs()).sum::<f64>() * bound).floor() as i32 + 1 + slack)
        .collect();
    let mut small_units = Vec::new();
    for a in exponent_box(&box_bounds) {
        if a.iter().all(|&x| x == 0) {
            continue;
        }
        let logs: Vec<f64> = (0..n).map(|k| (0..r).map(|i| 2.0 * a[i] as f64 * ug.log_embeddings[i][k]).sum()).collect();
        if logs.iter().any(|&l| l > log_c + 1e-9) {
            continue;
        }
        let exps: Vec<i32> = a.iter().map(|x| 2 * x).collect();
        let el = ug.unit_from_exponents(ctx, &exps);
        // certify u^{(k)} < C exactly: C_den·u - C_num < 0
        let scaled = el.scale(&c.denom().to_i128().unwrap()).sub(&Element::from_int(n, c.numer().to_i64().unwrap()));
        let mut ok = true;
        for k in 0..n {
            if ctx.sign_at(&scaled, k)? != std::cmp::Ordering::Less {
                ok = false;
                break;
            }
        }
        if ok {
            small_units.push(SmallUnit {
                trace: ctx.trace(&el),
                embeddings: ctx.embed_f64(&el),
                element: el,
                exponents: exps,
            });
        }
    }
    small_units.sort_by(|a, b| a.trace.cmp(&b.trace).then_with(|| a.exponents.cmp(&b.exponents)));
    let mut moves: Vec<IntElement> = small_units.iter().map(|s| s.element.clone()).collect();
    for s in &small_units {
        let inv = ug.unit_from_exponents(ctx, &s.exponents.iter().map(|e| -e).collect::<Vec<_>>());
        if !moves.contains(&inv) {
            moves.push(inv);
        }
    }
    let slice_vertices = slice_vertices(&small_units, n);
    let min_norm = slice_vertices.iter().map(|v| v.iter().product::<f64>()).fold(f64::MAX, f64::min);
    let min_coord = slice_vertices.iter().flat_map(|v| v.iter().copied()).fold(f64::MAX, f64::min);
    let max_coord = slice_vertices.iter().flat_map(|v| v.iter().copied()).fold(0.0, f64::max);
    let size_constants = (n as f64 * min_coord, max_coord / min_norm.powf(1.0 / n as f64));
    Ok(FundamentalDomain {
        contracting_unit: u,
        contracting_exponents: u_exps,
        c,
        small_units,
        moves,
        slice_vertices,
        size_constants,
        degree: n,
    })
}

fn invert_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(piv, col);
        let p = a[col][col];
        for j in 0..2 * n {
            a[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in 0..2 * n {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn solve_f64(m: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let inv = invert_f64(m)?;
    Some(inv.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
}

/// Vertices of `{x : Σx = 1, x ≥ 0, (u - 1)·x ≥ 0 for u ∈ Ũ}`.
fn slice_vertices(small: &[SmallUnit], n: usize) -> Vec<Vec<f64>> {
    let mut cons: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            v
        })
        .collect();
    for s in small {
        cons.push(s.embeddings.iter().map(|x| x - 1.0).collect());
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(cons.len(), n - 1) {
        let mut m: Vec<Vec<f64>> = subset.iter().map(|&i| cons[i].clone()).collect();
        m.push(vec![1.0; n]);
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        let Some(x) = solve_f64(&m, &b) else { continue };
        if cons.iter().all(|c| c.iter().zip(&x).map(|(a, y)| a * y).sum::<f64>() >= -1e-10) {
            if !out.iter().any(|v| v.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-10)) {
                out.push(x);
            }
        }
    }
    out
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainPosition {
    Inside,
    Boundary,
    Outside,
}

impl FundamentalDomain {
    /// Classify a totally positive integral element against `D`.
    pub fn contains(&self, ctx: &FieldContext, e: &IntElement) -> Result<DomainPosition> {
        if !ctx.is_totally_positive(e)? {
            return Err(Error::NotTotallyPositive);
        }
        Ok(self.classify_tp(ctx, e))
    }

    fn classify_tp(&self, ctx: &FieldContext, e: &IntElement) -> DomainPosition {
        let t = ctx.trace(e);
        let mut boundary = false;
        for s in &self.small_units {
            let tu = ctx.trace_product(&s.element, e);
            if tu < t {
                return DomainPosition::Outside;
            }
            if tu == t {
                boundary = true;
            }
        }
        if boundary {
            DomainPosition::Boundary
        } else {
            DomainPosition::Inside
        }
    }

    /// The trace-minimal totally positive associate of `e` by a totally
    /// positive unit, ties broken by the lexicographically smallest coordinates.
    pub fn reduce(&self, ctx: &FieldContext, e: &IntElement) -> Result<IntElement> {
        if !ctx.is_totally_positive(e)? {
            return Err(Error::NotTotallyPositive);
        }
        let mut x = e.clone();
        let mut t = ctx.trace(&x);
        loop {
            let mut best: Option<(i128, usize)> = None;
            for (i, m) in self.moves.iter().enumerate() {
                let tm = ctx.trace_product(m, &x);
                if tm < t && best.map_or(true, |(b, _)| tm < b) {
                    best = Some((tm, i));
                }
            }
            match best {
                Some((tm, i)) => {
                    x = ctx.mul(&x, &self.moves[i]);
                    t = tm;
                }
                None => break,
            }
        }
        // all minimal-trace associates are connected by equal-trace Ũ moves
        let mut seen: BTreeSet<Vec<i128>> = BTreeSet::new();
        seen.insert(x.coords.clone());
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            for m in &self.moves {
                if ctx.trace_product(m, &y) == t {
                    let z = ctx.mul(&y, m);
                    if seen.insert(z.coords.clone()) {
                        queue.push_back(z);
                    }
                }
            }
        }
        Ok(Element::new(seen.into_iter().next().unwrap()))
    }

    /// Canonical totally positive generator of `(e)`.
    pub fn canonical_associate(&self, ctx: &FieldContext, ug: &UnitGroupData, e: &IntElement) -> Result<IntElement> {
        let tp = ug.make_totally_positive(ctx, e)?;
        self.reduce(ctx, &tp)
    }
}

/// Every integral element of `D̄` with norm at most `x`, counted in total and
/// by residue class modulo each ideal in `moduli`.
#[derive(Debug, Clone)]
pub struct DomainCensus {
    pub x: u64,
    pub total: u64,
    pub moduli: Vec<IdealFactorization>,
    /// Per modulus: canonical residue (see [`lattice::reduce_mod_hnf`]) → count.
    pub classes: Vec<BTreeMap<Vec<i128>, u64>>,
    hnfs: Vec<Vec<Vec<i128>>>,
}

impl DomainCensus {
    pub fn count(&self, modulus_index: usize, nu: &[i128]) -> u64 {
        let h = &self.hnfs[modulus_index];
        if nu.iter().enumerate().any(|(i, &c)| c < 0 || c >= h[i][i]) {
            return 0;
        }
        self.classes[modulus_index].get(nu).copied().unwrap_or(0)
    }

    /// All canonical residues modulo the `i`-th modulus.
    pub fn residues(&self, modulus_index: usize) -> Vec<Vec<i128>> {
        let h = &self.hnfs[modulus_index];
        let bounds: Vec<i128> = (0..h.len()).map(|i| h[i][i]).collect();
        let mut out = vec![Vec::new()];
        for &b in &bounds {
            let mut next = Vec::new();
            for v in &out {
                for c in 0..b {
                    let mut w = v.clone();
                    w.push(c);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    /// `max_ν |N(x; 𝔪, ν) − N(x)/N𝔪|` for the `i`-th modulus.
    pub fn max_residual(&self, modulus_index: usize) -> f64 {
        let expected = self.total as f64 / self.moduli[modulus_index].norm as f64;
        self.residues(modulus_index)
            .iter()
            .map(|nu| (self.count(modulus_index, nu) as f64 - expected).abs())
            .fold(0.0, f64::max)
    }
}

pub const CENSUS_BUDGET: u64 = 10_000_000;

/// Exact census of `{α ∈ O ∩ D̄ : Nα ≤ x}`.
///
/// For fixed `β = a_1 α + … + a_{n-1} α^{n-1}` the conditions on `a_0` are:
/// `a_0 (Tr u − n) ≥ Tr β − Tr(uβ)` for every `u ∈ Ũ` (a lower bound),
/// positivity, and the norm bound, which is monotone in `a_0` once all
/// embeddings are positive. The box for `β` comes from the vertices of the
/// trace-one slice of `D̄`.
pub fn census(ctx: &FieldContext, dom: &FundamentalDomain, x: u64, moduli: &[IdealFactorization]) -> Result<DomainCensus> {
    if x > CENSUS_BUDGET {
        return Err(Error::CostGuard { what: "census norm bound".into(), size: x, budget: CENSUS_BUDGET });
    }
    let n = ctx.degree;
    let hnfs = moduli.iter().map(|m| ideals::ideal_hnf(ctx, m)).collect::<Result<Vec<_>>>()?;
    let min_norm = dom.slice_vertices.iter().map(|v| v.iter().product::<f64>()).fold(f64::MAX, f64::min);
    let t_max = (x as f64 / min_norm).powf(1.0 / n as f64) * (1.0 + 1e-9);
    // coordinates a = V^{-1} y with V[k][j] = r_k^j
    let v: Vec<Vec<f64>> = ctx.approx_embeddings.iter().map(|&r| (0..n).map(|j| r.powi(j as i32)).collect()).collect();
    let vinv = invert_f64(&v).ok_or(Error::InvalidParameter("singular embedding matrix".into()))?;
    let mut ranges: Vec<(i64, i64)> = Vec::new();
    for j in 1..n {
        let vals: Vec<f64> = dom
            .slice_vertices
            .iter()
            .map(|y| (0..n).map(|k| vinv[j][k] * y[k]).sum::<f64>() * t_max)
            .collect();
        let lo = vals.iter().cloned().fold(0.0, f64::min).floor() as i64 - 2;
        let hi = vals.iter().cloned().fold(0.0, f64::max).ceil() as i64 + 2;
        ranges.push((lo, hi));
    }
    let unit_traces: Vec<i128> = dom.small_units.iter().map(|s| s.trace).collect();
    let outer: Vec<i64> = (ranges[0].0..=ranges[0].1).collect();
    let partials: Vec<Result<(u64, Vec<BTreeMap<Vec<i128>, u64>>)>> = outer
        .par_iter()
        .map(|&a1| {
            let mut total = 0u64;
            let mut classes: Vec<BTreeMap<Vec<i128>, u64>> = vec![BTreeMap::new(); moduli.len()];
            let inner = exponent_ranges(&ranges[1..]);
            for rest in inner {
                let mut coords = vec![0i128; n];
                coords[1] = a1 as i128;
                for (j, &c) in rest.iter().enumerate() {
                    coords[j + 2] = c as i128;
                }
                let beta = Element::new(coords);
                scan_line(ctx, dom, &unit_traces, &beta, x, t_max, &hnfs, &mut total, &mut classes)?;
            }
            Ok((total, classes))
        })
        .collect();
    let mut total = 0u64;
    let mut classes: Vec<BTreeMap<Vec<i128>, u64>> = vec![BTreeMap::new(); moduli.len()];
    for p in partials {
        let (t, cl) = p?;
        total += t;
        for (acc, part) in classes.iter_mut().zip(cl) {
            for (k, v) in part {
                *acc.entry(k).or_insert(0) += v;
            }
        }
    }
    Ok(DomainCensus { x, total, moduli: moduli.to_vec(), classes, hnfs })
}

fn exponent_ranges(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for v in &out {
            for c in lo..=hi {
                let mut w = v.clone();
                w.push(c);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn scan_line(
    ctx: &FieldContext,
    dom: &FundamentalDomain,
    unit_traces: &[i128],
    beta: &IntElement,
    x: u64,
    t_max: f64,
    hnfs: &[Vec<Vec<i128>>],
    total: &mut u64,
    classes: &mut [BTreeMap<Vec<i128>, u64>],
) -> Result<()> {
    let n = ctx.degree as i128;
    let tb = ctx.trace(beta);
    // lower bound from the Ũ constraints
    let mut lo = i128::MIN;
    for (s, &tu) in dom.small_units.iter().zip(unit_traces) {
        let num = tb - ctx.trace_product(&s.element, beta);
        let den = tu - n;
        lo = lo.max(div_ceil(num, den));
    }
    let emb = ctx.embed_f64(beta);
    // positivity: a0 > -β^{(k)}; trace bound: n a0 + Tr β ≤ t_max
    let pos = emb.iter().map(|b| -b).fold(f64::MIN, f64::max).floor() as i128 - 1;
    let hi = ((t_max - tb as f64) / n as f64).floor() as i128 + 1;
    let mut a0 = lo.max(pos);
    let xf = x as f64;
    while a0 <= hi {
        let vals: Vec<f64> = emb.iter().map(|b| a0 as f64 + b).collect();
        if vals.iter().any(|&v| v <= 1e-6) {
            let mut c = beta.coords.clone();
            c[0] = a0;
            let e = Element::new(c);
            if e.is_zero() || !ctx.is_totally_positive(&e)? {
                a0 += 1;
                continue;
            }
        }
        let nf: f64 = vals.iter().product();
        let mut c = beta.coords.clone();
        c[0] = a0;
        let e = Element::new(c);
        if nf > xf * (1.0 + 1e-9) + 1.0 {
            break;
        }
        if nf > xf * (1.0 - 1e-9) - 1.0 && ctx.norm(&e) > x as i128 {
            break;
        }
        *total += 1;
        for (h, map) in hnfs.iter().zip(classes.iter_mut()) {
            let r = lattice::reduce_mod_hnf(&e.coords, h);
            *map.entry(r).or_insert(0) += 1;
        }
        a0 += 1;
    }
    Ok(())
}

fn div_ceil(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

/// `count_in_domain`: number of integral `α ∈ D̄` with `Nα ≤ x`, `α ≡ ν (mod 𝔪)`.
pub fn count_in_domain(
    ctx: &FieldContext,
    dom: &FundamentalDomain,
    x: u64,
    modulus: &IdealFactorization,
    nu: &[i128],
) -> Result<u64> {
    let c = census(ctx, dom, x, std::slice::from_ref(modulus))?;
    Ok(c.count(0, nu))
}

/// Sum of `u^{(k)}` as an exact integer trace is `> n` for every `u ≠ 1` in U⁺.
pub fn trace_exceeds_degree(ctx: &FieldContext, u: &IntElement) -> bool {
    ctx.trace(u) > ctx.degree as i128
}

/// Exponent search for the minimal trace in the orbit `{ε^{2a} e : |a_i| ≤ bound}`.
/// Test oracle for [`FundamentalDomain::reduce`].
pub fn orbit_minimum_bruteforce(
    ctx: &FieldContext,
    ug: &UnitGroupData,
    e: &IntElement,
    bound: i32,
) -> (i128, Vec<IntElement>) {
    let r = ug.rank();
    let mut best = i128::MAX;
    let mut arg: Vec<IntElement> = Vec::new();
    for a in exponent_box(&vec![bound; r]) {
        let exps: Vec<i32> = a.iter().map(|x| 2 * x).collect();
        let u = ug.unit_from_exponents(ctx, &exps);
        let t = ctx.trace_product(&u, e);
        if t < best {
            best = t;
            arg = vec![ctx.mul(&u, e)];
        } else if t == best {
            arg.push(ctx.mul(&u, e));
        }
    }
    arg.sort();
    arg.dedup();
    (best, arg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (FieldContext, UnitGroupData, FundamentalDomain) {
        let ctx = FieldContext::shanks_cubic(1).unwrap();
        let ug = UnitGroupData::new(&ctx).unwrap();
        let dom = build_domain(&ctx, &ug).unwrap();
        (ctx, ug, dom)
    }

    #[test]
    fn contracting_unit_shape() {
        let (ctx, _, dom) = setup();
        let emb = ctx.embed_f64(&dom.contracting_unit);
        assert_eq!(emb.iter().filter(|&&x| x <= 0.5).count(), 2);
        assert_eq!(ctx.norm(&dom.contracting_unit), 1);
        assert!(ctx.is_totally_positive(&dom.contracting_unit).unwrap());
    }

    #[test]
    fn small_units_properties() {
        let (ctx, ug, dom) = setup();
        assert!(!dom.small_units.is_empty());
        let c = dom.c.to_f64().unwrap();
        for s in &dom.small_units {
            assert!(!s.element.is_one());
            assert!(ctx.is_totally_positive(&s.element).unwrap());
            assert!(s.embeddings.iter().all(|&x| x < c));
            assert!(trace_exceeds_degree(&ctx, &s.element));
        }
        let wider = build_domain_with_slack(&ctx, &ug, 2).unwrap();
        assert_eq!(wider.small_units.len(), dom.small_units.len());
    }

    #[test]
    fn quadratic_domain() {
        let ctx = FieldContext::real_quadratic(5).unwrap();
        let ug = UnitGroupData::new(&ctx).unwrap();
        let dom = build_domain(&ctx, &ug).unwrap();
        let emb = ctx.embed_f64(&dom.contracting_unit);
        assert!(emb.iter().any(|&x| (x - 0.381966).abs() < 1e-5));
        for s in &dom.small_units {
            assert_eq!(s.exponents.len(), 1);
            assert!(s.exponents[0] % 2 == 0);
        }
    }

    #[test]
    fn make_tp_examples() {
        let (ctx, ug, _) = setup();
        let a = Element::<i128>::alpha(3);
        let tp = ug.make_totally_positive(&ctx, &a).unwrap();
        assert!(ctx.is_totally_positive(&tp).unwrap());
        assert_eq!(ctx.norm(&tp).abs(), 1);
        assert_eq!(ug.make_totally_positive(&ctx, &Element::from_int(3, -1)).unwrap(), Element::one(3));
        let one = Element::<i128>::one(3);
        assert_eq!(ug.make_totally_positive(&ctx, &one).unwrap(), one);
    }

    #[test]
    fn domain_membership_and_reduction() {
        let (ctx, ug, dom) = setup();
        let one = Element::<i128>::one(3);
        assert_eq!(dom.contains(&ctx, &one).unwrap(), DomainPosition::Inside);
        let e = Element::new(vec![5i128, 2, -1]);
        let e = ug.make_totally_positive(&ctx, &e).unwrap();
        let r = dom.reduce(&ctx, &e).unwrap();
        assert_ne!(dom.contains(&ctx, &r).unwrap(), DomainPosition::Outside);
        assert!(ctx.trace(&r) <= ctx.trace(&e));
        assert_eq!(dom.reduce(&ctx, &r).unwrap(), r);
        let u = ug.unit_from_exponents(&ctx, &[4, -6]);
        assert_eq!(dom.reduce(&ctx, &ctx.mul(&u, &e)).unwrap(), r);
        let (best, _) = orbit_minimum_bruteforce(&ctx, &ug, &e, 6);
        assert_eq!(best, ctx.trace(&r));
    }

    #[test]
    fn sign_report() {
        let ctx = FieldContext::shanks_cubic(1).unwrap();
        assert!(verify_unit_plus_square(&ctx).unwrap().passed);
        let fake = vec![vec![-1i8, -1, -1], vec![1, 1, 1], vec![1, 1, 1]];
        assert!(!verify_sign_vectors(&fake, 3).passed);
    }

    #[test]
    fn census_small() {
        let (ctx, _, dom) = setup();
        let c = census(&ctx, &dom, 200, &[IdealFactorization::unit()]).unwrap();
        // brute force: every element of norm ≤ 200 in D̄ lies in the coordinate box
        let mut brute = 0u64;
        for a0 in -60i128..=60 {
            for a1 in -60i128..=60 {
                for a2 in -60i128..=60 {
                    let e = Element::new(vec![a0, a1, a2]);
                    let emb = ctx.embed_f64(&e);
                    if emb.iter().any(|&v| v <= 0.0) {
                        continue;
                    }
                    if emb.iter().product::<f64>() > 201.0 || ctx.norm(&e) > 200 {
                        continue;
                    }
                    if dom.classify_tp(&ctx, &e) != DomainPosition::Outside {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(c.total, brute);
    }
}
