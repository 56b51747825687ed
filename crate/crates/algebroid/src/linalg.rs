//! Linear algebra over polynomial rings.
//!
//! Two regimes are used. Free presentations (kernels, right inverses,
//! coordinates in a basis) are computed by elimination with constant
//! pivots only, so every result stays polynomial; elimination that gets
//! stuck on a non-constant pivot is reported as unsupported. Ranks at the
//! generic point are computed by fraction-free (Bareiss) elimination.

use crate::error::{Error, Result};
use crate::scalar::Field;
use crate::symcalc::Poly;

/// Row-major matrix of polynomials.
pub type Mat<S> = Vec<Vec<Poly<S>>>;

pub fn zeros<S: Field>(n: usize, rows: usize, cols: usize) -> Mat<S> {
    vec![vec![Poly::zero(n); cols]; rows]
}

pub fn identity<S: Field>(n: usize, size: usize) -> Mat<S> {
    let mut m = zeros(n, size, size);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Poly::one(n);
    }
    m
}

pub fn transpose<S: Field>(n: usize, m: &Mat<S>, cols: usize) -> Mat<S> {
    let mut t = zeros(n, cols, m.len());
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = v.clone();
        }
    }
    t
}

pub fn mat_mul<S: Field>(n: usize, a: &Mat<S>, b: &Mat<S>, bcols: usize) -> Mat<S> {
    let mut out = zeros(n, a.len(), bcols);
    for (i, row) in a.iter().enumerate() {
        for (k, aik) in row.iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..bcols {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(aik * &b[k][j]);
                }
            }
        }
    }
    out
}

pub fn mat_vec<S: Field>(n: usize, a: &Mat<S>, v: &[Poly<S>]) -> Vec<Poly<S>> {
    a.iter().map(|row| dot(n, row, v)).collect()
}

pub fn dot<S: Field>(n: usize, a: &[Poly<S>], b: &[Poly<S>]) -> Poly<S> {
    let mut acc = Poly::zero(n);
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc + x * y;
        }
    }
    acc
}

pub fn vec_add<S: Field>(a: &[Poly<S>], b: &[Poly<S>]) -> Vec<Poly<S>> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub<S: Field>(a: &[Poly<S>], b: &[Poly<S>]) -> Vec<Poly<S>> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale<S: Field>(f: &Poly<S>, a: &[Poly<S>]) -> Vec<Poly<S>> {
    a.iter().map(|x| f * x).collect()
}

pub fn vec_is_zero<S: Field>(a: &[Poly<S>]) -> bool {
    a.iter().all(Poly::is_zero)
}

pub fn unit_vec<S: Field>(n: usize, len: usize, i: usize) -> Vec<Poly<S>> {
    let mut v = vec![Poly::zero(n); len];
    v[i] = Poly::one(n);
    v
}

/// Gauss–Jordan elimination restricted to constant pivots.
#[derive(Clone, Debug)]
pub struct UnitRref<S> {
    pub reduced: Mat<S>,
    /// Accumulated row operations: `reduced = transform · input`.
    pub transform: Mat<S>,
    /// `(row, column)` of each pivot, in elimination order.
    pub pivots: Vec<(usize, usize)>,
}

impl<S: Field> UnitRref<S> {
    pub fn new(n: usize, m: &Mat<S>, col_order: &[usize]) -> Self {
        let rows = m.len();
        let mut r = m.clone();
        let mut t = identity(n, rows);
        let mut used = vec![false; rows];
        let mut pivots = Vec::new();
        for &col in col_order {
            let found = (0..rows).find(|&i| {
                !used[i] && !r[i][col].is_zero() && r[i][col].is_constant()
            });
            let p = match found {
                Some(p) => p,
                None => continue,
            };
            let inv = S::one() / r[p][col].as_constant().unwrap();
            r[p] = r[p].iter().map(|x| x.scale(&inv)).collect();
            t[p] = t[p].iter().map(|x| x.scale(&inv)).collect();
            for j in 0..rows {
                if j == p || r[j][col].is_zero() {
                    continue;
                }
                let f = r[j][col].clone();
                r[j] = vec_sub(&r[j], &vec_scale(&f, &r[p]));
                t[j] = vec_sub(&t[j], &vec_scale(&f, &t[p]));
            }
            used[p] = true;
            pivots.push((p, col));
        }
        UnitRref { reduced: r, transform: t, pivots }
    }

    /// True if every row without a pivot reduced to zero.
    pub fn complete(&self) -> bool {
        self.reduced
            .iter()
            .enumerate()
            .all(|(i, row)| self.pivots.iter().any(|p| p.0 == i) || vec_is_zero(row))
    }
}

/// Free basis of the kernel of `m` (a map `S^cols → S^rows`), with pivots
/// searched in `col_order`. Fails unless elimination completes with
/// constant pivots.
pub fn nullspace<S: Field>(n: usize, m: &Mat<S>, cols: usize, col_order: &[usize]) -> Result<Vec<Vec<Poly<S>>>> {
    let rr = UnitRref::new(n, m, col_order);
    if !rr.complete() {
        return Err(Error::unsupported("kernel has no free presentation with constant pivots"));
    }
    let pivot_cols: Vec<usize> = rr.pivots.iter().map(|p| p.1).collect();
    let mut out = Vec::new();
    for f in 0..cols {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![Poly::zero(n); cols];
        v[f] = Poly::one(n);
        for &(row, col) in &rr.pivots {
            v[col] = -rr.reduced[row][f].clone();
        }
        debug_assert!(vec_is_zero(&mat_vec(n, m, &v)));
        out.push(v);
    }
    Ok(out)
}

/// Polynomial right inverse of `m` (`rows × cols`), i.e. `m · s = 1`.
pub fn right_inverse<S: Field>(n: usize, m: &Mat<S>, cols: usize) -> Result<Mat<S>> {
    let rows = m.len();
    let order: Vec<usize> = (0..cols).collect();
    let rr = UnitRref::new(n, m, &order);
    if rr.pivots.len() != rows {
        return Err(Error::unsupported("no right inverse found with constant pivots"));
    }
    let mut s = zeros(n, cols, rows);
    for &(row, col) in &rr.pivots {
        s[col] = rr.transform[row].clone();
    }
    if mat_mul(n, m, &s, rows) != identity(n, rows) {
        return Err(Error::unsupported("right inverse check failed"));
    }
    Ok(s)
}

/// Coordinates with respect to a free basis of a direct summand.
#[derive(Clone, Debug)]
pub struct Solver<S> {
    n: usize,
    basis: Vec<Vec<Poly<S>>>,
    rref: UnitRref<S>,
}

impl<S: Field> Solver<S> {
    /// `basis` lists the basis vectors (all of one length).
    pub fn new(n: usize, basis: Vec<Vec<Poly<S>>>, len: usize) -> Result<Self> {
        let k = basis.len();
        let mut m = zeros(n, len, k);
        for (j, b) in basis.iter().enumerate() {
            if b.len() != len {
                return Err(Error::dim("basis vectors of different lengths"));
            }
            for i in 0..len {
                m[i][j] = b[i].clone();
            }
        }
        let order: Vec<usize> = (0..k).collect();
        let rref = UnitRref::new(n, &m, &order);
        if rref.pivots.len() != k {
            return Err(Error::unsupported("basis has no constant-pivot coordinates"));
        }
        Ok(Solver { n, basis, rref })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Poly<S>>] {
        &self.basis
    }

    /// Coordinates `c` with `Σ c_j b_j = v`; error if `v` is not in the span.
    pub fn solve(&self, v: &[Poly<S>]) -> Result<Vec<Poly<S>>> {
        let w = mat_vec(self.n, &self.rref.transform, v);
        let mut c = vec![Poly::zero(self.n); self.basis.len()];
        for &(row, col) in &self.rref.pivots {
            c[col] = w[row].clone();
        }
        let mut back = vec![Poly::zero(self.n); v.len()];
        for (cj, b) in c.iter().zip(&self.basis) {
            if !cj.is_zero() {
                back = vec_add(&back, &vec_scale(cj, b));
            }
        }
        if back != v {
            return Err(Error::invalid("element is not in the span of the basis"));
        }
        Ok(c)
    }
}

/// Rank over the fraction field (Bareiss elimination).
pub fn generic_rank<S: Field>(n: usize, m: &Mat<S>) -> usize {
    bareiss(n, m).0
}

/// Determinant of a square matrix (fraction-free elimination).
pub fn det<S: Field>(n: usize, m: &Mat<S>) -> Poly<S> {
    let size = m.len();
    if size == 0 {
        return Poly::one(n);
    }
    let (rank, last, sign) = bareiss(n, m);
    if rank < size {
        Poly::zero(n)
    } else if sign {
        -last
    } else {
        last
    }
}

/// Returns (rank, last pivot, sign flip from row swaps).
fn bareiss<S: Field>(n: usize, m: &Mat<S>) -> (usize, Poly<S>, bool) {
    let rows = m.len();
    if rows == 0 {
        return (0, Poly::one(n), false);
    }
    let cols = m[0].len();
    let mut a = m.clone();
    let mut prev = Poly::one(n);
    let mut row = 0;
    let mut sign = false;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let p = match (row..rows).find(|&i| !a[i][col].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        if p != row {
            a.swap(p, row);
            sign = !sign;
        }
        for i in row + 1..rows {
            for j in col + 1..cols {
                let num = &(&a[i][j] * &a[row][col]) - &(&a[i][col] * &a[row][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][col] = Poly::zero(n);
        }
        prev = a[row][col].clone();
        row += 1;
    }
    (row, prev, sign)
}
