//! Dense linear algebra over any [`Scalar`] ring.
//!
//! Elimination pivots only on units. Over a field this is ordinary Gauss–Jordan elimination;
//! over jets it computes ranks at the base point and solves systems whose leading minors are
//! invertible there. [`Rref::clean`] records whether everything outside the pivot rows
//! eliminated to exact zero, i.e. whether the rank at the base point is the true rank.

use super::scalar::Scalar;
use crate::error::{Error, Result};

pub type Mat<S> = Vec<Vec<S>>;

pub fn zeros<S: Scalar>(rows: usize, cols: usize) -> Mat<S> {
    vec![vec![S::zero(); cols]; rows]
}

pub fn identity<S: Scalar>(n: usize) -> Mat<S> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

pub fn ncols<S>(m: &Mat<S>) -> usize {
    m.first().map_or(0, Vec::len)
}

pub fn transpose<S: Scalar>(m: &Mat<S>) -> Mat<S> {
    let (r, c) = (m.len(), ncols(m));
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn mat_mul<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    let inner = b.len();
    assert_eq!(ncols(a), inner, "matrix product dimensions");
    let c = ncols(b);
    a.iter()
        .map(|row| {
            (0..c)
                .map(|j| {
                    let mut acc = S::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() {
                            acc = acc + row[k].clone() * b[k][j].clone();
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<S: Scalar>(a: &Mat<S>, v: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone()))
        .collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn column<S: Scalar>(m: &Mat<S>, j: usize) -> Vec<S> {
    m.iter().map(|row| row[j].clone()).collect()
}

/// Matrix whose columns are the given vectors.
pub fn from_columns<S: Scalar>(cols: &[Vec<S>]) -> Mat<S> {
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

#[derive(Clone, Debug)]
pub struct Rref<S> {
    pub mat: Mat<S>,
    pub pivots: Vec<usize>,
    pub clean: bool,
}

impl<S> Rref<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Reduced row echelon form, restricting pivot search to the first `limit` columns.
fn rref_limited<S: Scalar>(m: &Mat<S>, limit: usize) -> Rref<S> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = ncols(&a).min(limit);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in a.iter().enumerate().skip(r) {
            if row[c].is_unit() {
                let score = row[c].base_f64().abs();
                if best.map_or(true, |(_, s)| score > s) {
                    best = Some((i, score));
                }
            }
        }
        let Some((p, _)) = best else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("pivot is a unit");
        a[r] = a[r].iter().map(|x| x.clone() * inv.clone()).collect();
        a[r][c] = S::one();
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..a[i].len() {
                if !a[r][j].is_zero() {
                    a[i][j] = a[i][j].clone() - f.clone() * a[r][j].clone();
                }
            }
            a[i][c] = S::zero();
        }
        pivots.push(c);
        r += 1;
    }
    let clean = a[r..].iter().all(|row| row[..cols].iter().all(Scalar::is_zero));
    Rref { mat: a, pivots, clean }
}

pub fn rref<S: Scalar>(m: &Mat<S>) -> Rref<S> {
    rref_limited(m, usize::MAX)
}

pub fn rank<S: Scalar>(m: &Mat<S>) -> usize {
    rref(m).rank()
}

/// Indices of a maximal set of independent columns, chosen greedily from the left.
pub fn independent_columns<S: Scalar>(m: &Mat<S>) -> Vec<usize> {
    rref(m).pivots
}

/// Basis of the right kernel, one vector per free column (free entry set to one).
pub fn kernel<S: Scalar>(m: &Mat<S>) -> Vec<Vec<S>> {
    let c = ncols(m);
    if m.is_empty() {
        return (0..c).map(|j| unit_vec(c, j)).collect();
    }
    let rr = rref(m);
    let mut basis = Vec::new();
    for free in (0..c).filter(|j| !rr.pivots.contains(j)) {
        let mut v = vec![S::zero(); c];
        v[free] = S::one();
        for (row, &p) in rr.pivots.iter().enumerate() {
            v[p] = -rr.mat[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Kernel that fails unless elimination left exact zeros outside the pivot rows.
pub fn kernel_checked<S: Scalar>(m: &Mat<S>) -> Result<Vec<Vec<S>>> {
    if !m.is_empty() && !rref(m).clean {
        return Err(Error::RankDropAlongCurve("rank at the base point is below the generic rank".into()));
    }
    Ok(kernel(m))
}

pub fn unit_vec<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

/// Solve `A X = B` for a matrix right-hand side; free variables are set to zero.
pub fn solve_many<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Result<Mat<S>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} equations, {} right-hand rows", a.len(), b.len())));
    }
    let n = ncols(a);
    let k = ncols(b);
    let aug: Mat<S> = a.iter().zip(b).map(|(ra, rb)| ra.iter().chain(rb).cloned().collect()).collect();
    let rr = rref_limited(&aug, n);
    let r = rr.rank();
    if rr.mat[r..].iter().any(|row| row.iter().any(|x| !x.is_zero())) {
        return Err(Error::InconsistentSystem);
    }
    let mut x = zeros(n, k);
    for (row, &p) in rr.pivots.iter().enumerate() {
        x[p] = rr.mat[row][n..].to_vec();
    }
    Ok(x)
}

pub fn solve<S: Scalar>(a: &Mat<S>, b: &[S]) -> Result<Vec<S>> {
    let bm: Mat<S> = b.iter().map(|x| vec![x.clone()]).collect();
    Ok(solve_many(a, &bm)?.into_iter().map(|mut r| r.remove(0)).collect())
}

pub fn inverse<S: Scalar>(a: &Mat<S>) -> Result<Mat<S>> {
    let n = a.len();
    if ncols(a) != n {
        return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
    }
    if rank(a) != n {
        return Err(Error::InconsistentSystem);
    }
    solve_many(a, &identity(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{rat_int, Rat};

    fn m(rows: &[&[i64]]) -> Mat<Rat> {
        rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()
    }

    #[test]
    fn identity_rank() {
        assert_eq!(rank(&identity::<Rat>(3)), 3);
    }

    #[test]
    fn rank_one_kernel() {
        let k = kernel(&m(&[&[1, 2], &[2, 4]]));
        assert_eq!(k, vec![vec![rat_int(-2), rat_int(1)]]);
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let x = solve(&a, &[rat_int(3), rat_int(2)]).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(1)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert_eq!(solve(&m(&[&[1, 1], &[1, 1]]), &[rat_int(1), rat_int(2)]), Err(Error::InconsistentSystem));
    }

    #[test]
    fn float_backend_tolerance() {
        let a: Mat<f64> = vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-13]];
        assert_eq!(rank(&a), 1);
    }
}
