//! Dense matrices over a [`Scalar`] and the brute-force routines every closed
//! form is checked against: determinant, inverse, cofactor sum and the
//! Schur-complement determinant.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        got: usize,
    },
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("{op} needs at least a {min}x{min} matrix, got {n}x{n}")]
    TooSmall {
        op: &'static str,
        n: usize,
        min: usize,
    },
    #[error("{got} labels for a dimension of size {expected}")]
    LabelCount { expected: usize, got: usize },
    #[error("matrix is singular: rank {rank} of {n}")]
    Singular { rank: usize, n: usize },
    #[error("split {split} out of range for a {n}x{n} matrix")]
    InvalidSplit { split: usize, n: usize },
    #[error("{which} block of the split at {split} is singular")]
    SingularPivotBlock { which: &'static str, split: usize },
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

/// Row-major dense matrix with optional vertex labels on rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
            row_labels: Vec::new(),
            col_labels: Vec::new(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    got: row.len(),
                    expected: n_cols,
                });
            }
            entries.extend(row);
        }
        Self::new(n_rows, n_cols, entries)
    }

    /// Convenience for tests and fixtures: integer entries.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| T::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
            row_labels: Vec::new(),
            col_labels: Vec::new(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// The all-ones matrix `J`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::one())
    }

    pub fn column(values: Vec<T>) -> Self {
        let n = values.len();
        Self {
            rows: n,
            cols: 1,
            entries: values,
            row_labels: Vec::new(),
            col_labels: Vec::new(),
        }
    }

    pub fn with_labels(mut self, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        for (expected, got) in [(self.rows, row_labels.len()), (self.cols, col_labels.len())] {
            if got != 0 && got != expected {
                return Err(LinalgError::LabelCount { expected, got });
            }
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    /// Labels rows and columns with the same vertex list.
    pub fn with_vertex_labels(self, labels: Vec<String>) -> Result<Self> {
        self.with_labels(labels.clone(), labels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries of a column vector (or of the first column).
    pub fn column_values(&self) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, 0).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone());
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        out.entries = T::matmul(self.rows, self.cols, rhs.cols, &self.entries, &rhs.entries);
        out.row_labels = self.row_labels.clone();
        out.col_labels = rhs.col_labels.clone();
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, op: &'static str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = self.clone();
        for (o, r) in out.entries.iter_mut().zip(&rhs.entries) {
            *o = f(o, r);
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "sub", |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.clone() * s.clone();
        }
        out
    }

    /// Keeps the rows and columns listed in `idx`, in that order.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        let mut sub = Self::from_fn(idx.len(), idx.len(), |i, j| {
            self.get(idx[i], idx[j]).clone()
        });
        if !self.row_labels.is_empty() {
            sub.row_labels = idx.iter().map(|&i| self.row_labels[i].clone()).collect();
        }
        if !self.col_labels.is_empty() {
            sub.col_labels = idx.iter().map(|&i| self.col_labels[i].clone()).collect();
        }
        sub
    }

    /// `M(i|j)`: delete row `i` and column `j`.
    pub fn minor(&self, i: usize, j: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        Self::from_fn(rows.len(), cols.len(), |a, b| {
            self.get(rows[a], cols[b]).clone()
        })
    }

    /// Contiguous block `[r0, r1) x [c0, c1)`.
    pub fn slice(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, v| acc + v.clone()))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + self.get(i, j).clone()))
            .collect()
    }

    /// First coordinate where the two matrices differ, ignoring labels.
    /// A shape mismatch reports `(0, 0)`.
    pub fn first_mismatch(&self, other: &Self) -> Option<(usize, usize)> {
        if self.shape() != other.shape() {
            return Some((0, 0));
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a != b)
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn same_entries(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.same_entries(&Self::identity(self.rows))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn det(&self) -> Result<T> {
        det(self)
    }
}

impl<'a, T: Scalar> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    /// Panics on a shape mismatch; use [`Matrix::try_mul`] otherwise.
    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl<'a, T: Scalar> Add<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl<'a, T: Scalar> Sub<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = -e.clone();
        }
        out
    }
}

fn require_square<T: Scalar>(m: &Matrix<T>) -> Result<usize> {
    if m.is_square() {
        Ok(m.rows)
    } else {
        Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        })
    }
}

/// Exact determinant (fraction-free elimination; see [`Scalar::determinant`]).
/// The empty matrix has determinant 1.
pub fn det<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    let n = require_square(m)?;
    Ok(T::determinant(n, &m.entries))
}

/// Reduces `[a | b]` with Gauss-Jordan elimination. Returns the rank of `a`.
fn gauss_jordan<T: Scalar>(a: &mut Matrix<T>, b: &mut Matrix<T>) -> usize {
    let n = a.rows;
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == n {
            break;
        }
        let pivot = if T::EXACT {
            (rank..n).find(|&i| !a.get(i, col).is_zero())
        } else {
            (rank..n)
                .filter(|&i| !a.get(i, col).is_zero())
                .max_by(|&x, &y| {
                    a.get(x, col)
                        .abs()
                        .partial_cmp(&a.get(y, col).abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        };
        let Some(p) = pivot else { continue };
        swap_rows(a, p, rank);
        swap_rows(b, p, rank);
        let inv = T::one() / a.get(rank, col).clone();
        scale_row(a, rank, &inv);
        scale_row(b, rank, &inv);
        for i in 0..n {
            if i == rank {
                continue;
            }
            let f = a.get(i, col).clone();
            if f.is_zero() {
                continue;
            }
            axpy_row(a, i, rank, &f);
            axpy_row(b, i, rank, &f);
        }
        rank += 1;
    }
    rank
}

fn swap_rows<T: Scalar>(m: &mut Matrix<T>, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..m.cols {
        m.entries.swap(i * m.cols + c, j * m.cols + c);
    }
}

fn scale_row<T: Scalar>(m: &mut Matrix<T>, i: usize, s: &T) {
    for c in 0..m.cols {
        let v = m.get(i, c).clone() * s.clone();
        m.set(i, c, v);
    }
}

// row_i -= f * row_src
fn axpy_row<T: Scalar>(m: &mut Matrix<T>, i: usize, src: usize, f: &T) {
    for c in 0..m.cols {
        let v = m.get(i, c).clone() - f.clone() * m.get(src, c).clone();
        m.set(i, c, v);
    }
}

/// Rank by row reduction.
pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    let mut a = m.clone();
    let mut b = Matrix::zeros(m.rows, 0);
    gauss_jordan(&mut a, &mut b)
}

/// Exact inverse by Gauss-Jordan elimination. Labels are swapped the way
/// `D^{-1}` maps columns back to rows.
pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = require_square(m)?;
    let mut a = m.clone();
    let mut inv = Matrix::identity(n);
    let rank = gauss_jordan(&mut a, &mut inv);
    if rank < n {
        return Err(LinalgError::Singular { rank, n });
    }
    inv.row_labels = m.col_labels.clone();
    inv.col_labels = m.row_labels.clone();
    Ok(inv)
}

/// Sum of all `n^2` cofactors, computed as `det M(1|1)` where `M` is `A` with
/// its first row subtracted from every row and then its first column
/// subtracted from every column.
///
/// A `1x1` matrix has cofactor sum 1 (its only cofactor is the empty
/// determinant); the empty matrix is rejected.
pub fn cofactor_sum<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    let n = require_square(a)?;
    if n == 0 {
        return Err(LinalgError::TooSmall {
            op: "cofactor_sum",
            n,
            min: 1,
        });
    }
    // Entry (i, j) of M(1|1), for i, j >= 1, is a_ij - a_1j - a_i1 + a_11.
    let reduced = Matrix::from_fn(n - 1, n - 1, |i, j| {
        let (i, j) = (i + 1, j + 1);
        a.get(i, j).clone() - a.get(0, j).clone() - a.get(i, 0).clone() + a.get(0, 0).clone()
    });
    det(&reduced)
}

fn check_split<T: Scalar>(m: &Matrix<T>, split: usize) -> Result<usize> {
    let n = require_square(m)?;
    if split == 0 || split >= n {
        return Err(LinalgError::InvalidSplit { split, n });
    }
    Ok(n)
}

/// `det B = det B11 * det(B22 - B21 B11^{-1} B12)` with `B11` the leading
/// `split x split` block.
pub fn schur_det<T: Scalar>(m: &Matrix<T>, split: usize) -> Result<T> {
    let n = check_split(m, split)?;
    let b11 = m.slice(0, split, 0, split);
    let b12 = m.slice(0, split, split, n);
    let b21 = m.slice(split, n, 0, split);
    let b22 = m.slice(split, n, split, n);
    let b11_inv = inverse(&b11).map_err(|_| LinalgError::SingularPivotBlock {
        which: "leading",
        split,
    })?;
    let complement = &b22 - &(&(&b21 * &b11_inv) * &b12);
    Ok(det(&b11)? * det(&complement)?)
}

/// Trailing-block form: `det B = det B22 * det(B11 - B12 B22^{-1} B21)`.
pub fn schur_det_trailing<T: Scalar>(m: &Matrix<T>, split: usize) -> Result<T> {
    let n = check_split(m, split)?;
    let b11 = m.slice(0, split, 0, split);
    let b12 = m.slice(0, split, split, n);
    let b21 = m.slice(split, n, 0, split);
    let b22 = m.slice(split, n, split, n);
    let b22_inv = inverse(&b22).map_err(|_| LinalgError::SingularPivotBlock {
        which: "trailing",
        split,
    })?;
    let complement = &b11 - &(&(&b12 * &b22_inv) * &b21);
    Ok(det(&b22)? * det(&complement)?)
}

/// `scale * beta * alpha^T` for column vectors of equal length.
pub fn rank_one<T: Scalar>(beta: &Matrix<T>, alpha: &Matrix<T>, scale: &T) -> Result<Matrix<T>> {
    if beta.cols != 1 || alpha.cols != 1 || beta.rows != alpha.rows {
        return Err(LinalgError::DimensionMismatch {
            op: "rank_one",
            left: beta.shape(),
            right: alpha.shape(),
        });
    }
    let n = beta.rows;
    let out = Matrix::from_fn(n, n, |i, j| {
        scale.clone() * beta.get(i, 0).clone() * alpha.get(j, 0).clone()
    });
    out.with_labels(beta.row_labels.clone(), alpha.row_labels.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{parse_rational, Rational};

    type M = Matrix<Rational>;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn m(rows: &[&[i64]]) -> M {
        M::from_ints(rows).unwrap()
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&M::identity(3)).unwrap(), q("1"));
        assert_eq!(det(&m(&[&[1, 2], &[3, 4]])).unwrap(), q("-2"));
        assert_eq!(det(&M::zeros(0, 0)).unwrap(), q("1"));
        assert!(matches!(
            det(&M::zeros(2, 3)),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse(&M::identity(4)).unwrap(), M::identity(4));
        let inv = inverse(&m(&[&[1, 2], &[3, 4]])).unwrap();
        let expected =
            M::from_rows(vec![vec![q("-2"), q("1")], vec![q("3/2"), q("-1/2")]]).unwrap();
        assert_eq!(inv, expected);
        assert_eq!(
            inverse(&M::ones(2, 2)),
            Err(LinalgError::Singular { rank: 1, n: 2 })
        );
    }

    #[test]
    fn inverse_needs_row_swap() {
        let a = m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let inv = inverse(&a).unwrap();
        assert!((&a * &inv).is_identity());
        assert_eq!(inv, a.transpose());
    }

    #[test]
    fn cofactor_sum_examples() {
        assert_eq!(cofactor_sum(&M::identity(2)).unwrap(), q("2"));
        assert_eq!(cofactor_sum(&m(&[&[0, 1], &[1, 0]])).unwrap(), q("-2"));
        // unit directed triangle; naive sum of the nine signed 2x2 minors is 9
        let tri = m(&[&[0, 1, 2], &[2, 0, 1], &[1, 2, 0]]);
        assert_eq!(cofactor_sum(&tri).unwrap(), q("9"));
        assert_eq!(cofactor_sum(&m(&[&[5]])).unwrap(), q("1"));
        assert!(cofactor_sum(&M::zeros(0, 0)).is_err());
    }

    #[test]
    fn schur_examples() {
        let d = M::from_rows(vec![vec![q("1"), q("0")], vec![q("0"), q("2")]]).unwrap();
        assert_eq!(schur_det(&d, 1).unwrap(), q("2"));
        assert_eq!(schur_det(&m(&[&[1, 2], &[3, 4]]), 1).unwrap(), q("-2"));
        assert_eq!(
            schur_det_trailing(&m(&[&[1, 2], &[3, 4]]), 1).unwrap(),
            q("-2")
        );
        assert!(matches!(
            schur_det(&m(&[&[0, 1], &[1, 0]]), 1),
            Err(LinalgError::SingularPivotBlock {
                which: "leading",
                ..
            })
        ));
        assert_eq!(
            schur_det_trailing(&m(&[&[0, 1], &[1, 1]]), 1).unwrap(),
            q("-1")
        );
        assert!(matches!(
            schur_det(&M::identity(3), 3),
            Err(LinalgError::InvalidSplit { .. })
        ));
    }

    #[test]
    fn rank_one_examples() {
        let ones = M::column(vec![q("1"), q("1")]);
        assert_eq!(rank_one(&ones, &ones, &q("1")).unwrap(), M::ones(2, 2));
        assert!(rank_one(&ones, &ones, &q("0")).unwrap().is_zero());
        let beta = M::column(vec![q("1"), q("2")]);
        let alpha = M::column(vec![q("3"), q("4")]);
        let expected = M::from_rows(vec![vec![q("3/2"), q("2")], vec![q("3"), q("4")]]).unwrap();
        assert_eq!(rank_one(&beta, &alpha, &q("1/2")).unwrap(), expected);
        let short = M::column(vec![q("1")]);
        assert!(rank_one(&beta, &short, &q("1")).is_err());
    }

    #[test]
    fn labels_follow_submatrix_and_transpose() {
        let a = m(&[&[1, 2], &[3, 4]])
            .with_labels(vec!["a".into(), "b".into()], vec!["x".into(), "y".into()])
            .unwrap();
        assert_eq!(a.transpose().row_labels(), ["x", "y"]);
        let sub = a.principal_submatrix(&[1]);
        assert_eq!(sub.row_labels(), ["b"]);
        assert_eq!(sub.get(0, 0), &q("4"));
        assert!(a.clone().with_labels(vec!["only".into()], vec![]).is_err());
    }

    #[test]
    fn float_instance_agrees() {
        let a = Matrix::<f64>::from_ints(&[[2, 1, 0], [1, 3, 1], [0, 1, 4]]).unwrap();
        assert!((det(&a).unwrap() - 18.0).abs() < 1e-9);
        let prod = &a * &inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - want).abs() < 1e-12);
            }
        }
    }
}
