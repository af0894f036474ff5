//! Integer lattices in coordinate space: Hermite normal form modulo a known
//! multiple of the determinant, LLL reduction under a real quadratic form and
//! Fincke–Pohst enumeration of short vectors.

/// Lower triangular Hermite normal form of the lattice spanned by `gens`
/// together with `d·Z^n`. `d` must be a multiple of the lattice determinant.
/// Rows are basis vectors; row `i` has zeros right of column `i` and a positive
/// diagonal. With this orientation the residues modulo a degree-one prime
/// ideal are rational integers.
pub fn hnf_mod(gens: &[Vec<i128>], d: i128, n: usize) -> Vec<Vec<i128>> {
    let rev: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().rev().copied().collect()).collect();
    let upper = hnf_upper(&rev, d, n);
    upper.into_iter().rev().map(|row| row.into_iter().rev().collect()).collect()
}

fn hnf_upper(gens: &[Vec<i128>], d: i128, n: usize) -> Vec<Vec<i128>> {
    assert!(d > 0);
    let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|c| c.rem_euclid(d)).collect()).collect();
    for i in 0..n {
        let mut v = vec![0i128; n];
        v[i] = d;
        rows.push(v);
    }
    let mut basis: Vec<Vec<i128>> = Vec::with_capacity(n);
    for col in 0..n {
        // combine all rows with a nonzero entry in `col` into one pivot row
        let mut pivot: Option<Vec<i128>> = None;
        let mut rest = Vec::with_capacity(rows.len());
        for row in rows.into_iter() {
            if row[col] == 0 {
                rest.push(row);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(row),
                Some(p) => {
                    let (g, s, t) = ext_gcd(p[col], row[col]);
                    let (a, b) = (p[col] / g, row[col] / g);
                    let new_p: Vec<i128> = (0..n).map(|k| (s * p[k] + t * row[k]).rem_euclid(d)).collect();
                    let new_r: Vec<i128> = (0..n).map(|k| (b * p[k] - a * row[k]).rem_euclid(d)).collect();
                    let mut np = new_p;
                    if np[col] == 0 {
                        // g ≡ 0 mod d: the pivot is d itself
                        np[col] = d;
                    }
                    pivot = Some(np);
                    if new_r.iter().any(|&c| c != 0) {
                        rest.push(new_r);
                    }
                }
            }
        }
        let mut p = pivot.expect("d·Z^n guarantees a pivot");
        let g = gcd(p[col], d);
        if g != p[col] {
            // p[col] may be replaced by gcd(p[col], d) since d·e_col is in the lattice
            let (_, s, _) = ext_gcd(p[col], d);
            p = p.iter().map(|&c| (s * c).rem_euclid(d)).collect();
            p[col] = g;
        }
        rows = rest;
        // d/h · pivot has a zero in this column modulo d; keep it so the lattice is unchanged
        let mult = d / p[col];
        let carried: Vec<i128> = p.iter().map(|&c| (c * mult).rem_euclid(d)).collect();
        if carried.iter().any(|&c| c != 0) {
            rows.push(carried);
        }
        basis.push(p);
    }
    // reduce entries above the diagonal
    for i in (0..n).rev() {
        for r in 0..i {
            let q = basis[r][i].div_euclid(basis[i][i]);
            if q != 0 {
                for k in i..n {
                    basis[r][k] -= q * basis[i][k];
                }
            }
        }
    }
    basis
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, s, t)` with `s a + t b = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn hnf_det(h: &[Vec<i128>]) -> i128 {
    (0..h.len()).map(|i| h[i][i]).product()
}

/// Canonical representative of `x` modulo the lattice with lower triangular
/// basis `h`: every coordinate lands in `[0, h_ii)`.
pub fn reduce_mod_hnf(x: &[i128], h: &[Vec<i128>]) -> Vec<i128> {
    let mut v = x.to_vec();
    for i in (0..h.len()).rev() {
        let q = v[i].div_euclid(h[i][i]);
        if q != 0 {
            for k in 0..=i {
                v[k] -= q * h[i][k];
            }
        }
    }
    v
}

pub fn in_lattice(x: &[i128], h: &[Vec<i128>]) -> bool {
    reduce_mod_hnf(x, h).iter().all(|&c| c == 0)
}

/// LLL-reduce the integer basis `basis` with respect to the quadratic form
/// `x ↦ |embed(x)|²`, where `embed` maps integer coordinates linearly to
/// real vectors through `emb` (`emb[j]` is the image of the `j`-th unit vector).
pub fn lll(basis: &[Vec<i128>], emb: &[Vec<f64>], delta: f64) -> Vec<Vec<i128>> {
    let n = basis.len();
    let mut b: Vec<Vec<i128>> = basis.to_vec();
    let real = |v: &Vec<i128>| -> Vec<f64> {
        let dim = emb[0].len();
        let mut out = vec![0.0; dim];
        for (j, &c) in v.iter().enumerate() {
            if c != 0 {
                for k in 0..dim {
                    out[k] += c as f64 * emb[j][k];
                }
            }
        }
        out
    };
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let mut k = 1;
    let mut iterations = 0usize;
    while k < n && iterations < 100_000 {
        iterations += 1;
        // Gram–Schmidt from scratch (tiny dimensions)
        let vs: Vec<Vec<f64>> = b.iter().map(&real).collect();
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        let mut bnorm = vec![0.0; n];
        for i in 0..n {
            let mut v = vs[i].clone();
            for j in 0..i {
                mu[i][j] = dot(&vs[i], &bstar[j]) / bnorm[j];
                for t in 0..v.len() {
                    v[t] -= mu[i][j] * bstar[j][t];
                }
            }
            bnorm[i] = dot(&v, &v);
            bstar.push(v);
        }
        // size reduction of b_k
        let mut changed = false;
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i128;
                for t in 0..b[k].len() {
                    b[k][t] -= qi * b[j][t];
                }
                for l in 0..=j {
                    mu[k][l] -= q * if l == j { 1.0 } else { mu[j][l] };
                }
                changed = true;
            }
        }
        if changed {
            // recompute with the reduced vector before the Lovász test
            let vk = real(&b[k]);
            let mut v = vk.clone();
            for j in 0..k {
                let m = dot(&vk, &bstar[j]) / bnorm[j];
                mu[k][j] = m;
                for t in 0..v.len() {
                    v[t] -= m * bstar[j][t];
                }
            }
            bnorm[k] = dot(&v, &v);
        }
        if bnorm[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bnorm[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Enumerate all nonzero integer combinations `x` (one of each `±x` pair) of the
/// rows of `basis` with `|embed(x)|² ≤ bound`, calling `visit` with the
/// integer coordinate vector. Stops early when `visit` returns `true`, and
/// reports whether it did.
pub fn short_vectors(
    basis: &[Vec<i128>],
    emb: &[Vec<f64>],
    bound: f64,
    visit: &mut dyn FnMut(&[i128]) -> bool,
) -> bool {
    let n = basis.len();
    let real: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| {
            let dim = emb[0].len();
            let mut out = vec![0.0; dim];
            for (j, &c) in v.iter().enumerate() {
                for k in 0..dim {
                    out[k] += c as f64 * emb[j][k];
                }
            }
            out
        })
        .collect();
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| real[i].iter().zip(&real[j]).map(|(a, b)| a * b).sum()).collect())
        .collect();
    // q[i][i] and q[i][j] (j > i) with Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²
    let mut q = gram.clone();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let mut x = vec![0i128; n];
    let bound = bound * (1.0 + 1e-9) + 1e-9;
    enumerate(n, &q, &mut x, bound, basis, visit)
}

fn enumerate(
    level: usize,
    q: &[Vec<f64>],
    x: &mut Vec<i128>,
    remaining: f64,
    basis: &[Vec<i128>],
    visit: &mut dyn FnMut(&[i128]) -> bool,
) -> bool {
    let n = x.len();
    if level == 0 {
        if x.iter().all(|&c| c == 0) {
            return false;
        }
        // keep one of ±x: first nonzero from the top positive
        let lead = x.iter().rev().find(|&&c| c != 0).copied().unwrap();
        if lead < 0 {
            return false;
        }
        let dim = basis[0].len();
        let mut v = vec![0i128; dim];
        for (i, &c) in x.iter().enumerate() {
            if c != 0 {
                for t in 0..dim {
                    v[t] += c * basis[i][t];
                }
            }
        }
        return visit(&v);
    }
    let i = level - 1;
    let center: f64 = -(i + 1..n).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let radius = (remaining / q[i][i]).max(0.0).sqrt();
    let lo = (center - radius).ceil() as i128;
    let hi = (center + radius).floor() as i128;
    for v in lo..=hi {
        let t = v as f64 - center;
        let used = q[i][i] * t * t;
        if used > remaining {
            continue;
        }
        x[i] = v;
        if enumerate(level - 1, q, x, remaining - used, basis, visit) {
            x[i] = 0;
            return true;
        }
    }
    x[i] = 0;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hnf_of_simple_lattices() {
        // lattice generated by (13, 0, 0), (-7, 1, 0), (0, -7, 1)
        let gens = vec![vec![13, 0, 0], vec![-7, 1, 0], vec![0, -7, 1]];
        let h = hnf_mod(&gens, 13, 3);
        assert_eq!(hnf_det(&h), 13);
        assert_eq!(h[0], vec![13, 0, 0]);
        assert_eq!(h[1][1], 1);
        assert_eq!(h[2][2], 1);
        assert_eq!(reduce_mod_hnf(&[0, 1, 0], &h), vec![7, 0, 0]);
        assert!(in_lattice(&[13, 0, 0], &h));
        assert!(in_lattice(&[-7, 1, 0], &h));
        assert!(!in_lattice(&[1, 0, 0], &h));
    }

    proptest! {
        #[test]
        fn hnf_membership_matches_generators(
            a in prop::collection::vec(-30i128..30, 3),
            b in prop::collection::vec(-30i128..30, 3),
            c in prop::collection::vec(-30i128..30, 3),
            x in -5i128..5, y in -5i128..5, z in -5i128..5,
        ) {
            let m = vec![a.clone(), b.clone(), c.clone()];
            let det = {
                let d = a[0]*(b[1]*c[2]-b[2]*c[1]) - a[1]*(b[0]*c[2]-b[2]*c[0]) + a[2]*(b[0]*c[1]-b[1]*c[0]);
                d.abs()
            };
            prop_assume!(det != 0);
            let h = hnf_mod(&m, det, 3);
            prop_assert_eq!(hnf_det(&h), det);
            let v: Vec<i128> = (0..3).map(|k| x*a[k] + y*b[k] + z*c[k]).collect();
            prop_assert!(in_lattice(&v, &h));
            let r = reduce_mod_hnf(&[x, y, z], &h);
            for i in 0..3 {
                prop_assert!(r[i] >= 0 && r[i] < h[i][i]);
            }
        }
    }

    #[test]
    fn lll_then_enumerate_finds_short_vector() {
        let emb = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let basis = vec![vec![1, 0], vec![1000, 1]];
        let red = lll(&basis, &emb, 0.99);
        let norms: Vec<i128> = red.iter().map(|v| v[0] * v[0] + v[1] * v[1]).collect();
        assert_eq!(norms.iter().max(), Some(&1));
        let mut found = Vec::new();
        short_vectors(&red, &emb, 2.0, &mut |v| {
            found.push(v.to_vec());
            false
        });
        assert_eq!(found.len(), 4); // ±(1,0), ±(0,1), ±(1,1), ±(1,-1) halves
    }
}
