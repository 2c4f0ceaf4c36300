//! Closed forms for a single block `dC(n; m_1, .., m_r)`: determinant,
//! cofactor sum, the parameters `lambda`, `alpha`, `beta`, the Laplacian-like
//! matrix and the rank-one inverse.
//!
//! Every vector and matrix is in the block's canonical vertex order (see
//! [`WeightedBlock::input_vertex_order`] to translate back).

use std::fmt;

use num_traits::pow;
use thiserror::Error;

use crate::distance::{block_distance_matrix, DistanceMatrix};
use crate::graph::{pair_sum, LocalVertex, WeightedBlock};
use crate::linalg::{rank_one, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    /// `cycle` is the caller's 1-based cycle number.
    #[error("cycle {cycle} has total weight zero")]
    ZeroCycleWeight { cycle: usize },
    #[error("lambda = 0, the distance matrix is singular")]
    Singular,
}

pub type Result<T, E = FormulaError> = std::result::Result<T, E>;

/// `(D, lambda, alpha, beta, L)` for a block or a whole graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Bag<T> {
    pub d: DistanceMatrix<T>,
    pub lambda: T,
    /// Column vector.
    pub alpha: Matrix<T>,
    /// Column vector.
    pub beta: Matrix<T>,
    pub laplacian_like: Matrix<T>,
}

impl<T: Scalar> Bag<T> {
    pub fn len(&self) -> usize {
        self.d.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `D^{-1} = -L + (1/lambda) beta alpha^T`.
    pub fn inverse(&self) -> Result<Matrix<T>> {
        if self.lambda.is_zero() {
            return Err(FormulaError::Singular);
        }
        let scale = T::one() / self.lambda.clone();
        let outer =
            rank_one(&self.beta, &self.alpha, &scale).expect("alpha and beta have equal length");
        Ok((&outer - &self.laplacian_like)
            .with_labels(self.d.row_labels().to_vec(), self.d.col_labels().to_vec())
            .expect("labels come from a matrix of the same size"))
    }
}

fn nonzero_cycles<T: Scalar>(block: &WeightedBlock<T>) -> Result<()> {
    match block.zero_cycle() {
        Some(k) => Err(FormulaError::ZeroCycleWeight {
            cycle: block.cycle_permutation()[k] + 1,
        }),
        None => Ok(()),
    }
}

fn sign<T: Scalar>(block: &WeightedBlock<T>) -> T {
    if (block.vertex_count() - 1).is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// `(-1)^{|V|-1} w_1^n prod_j w_j^{m_j}`.
fn cycle_product<T: Scalar>(block: &WeightedBlock<T>) -> T {
    let s = block.summary();
    let shape = block.shape();
    let mut out = sign(block) * pow(s.w[0].clone(), shape.n());
    for (w, &m) in s.w.iter().zip(shape.m()) {
        out = out * pow(w.clone(), m);
    }
    out
}

/// Determinant of the block's distance matrix.
///
/// Evaluated as `cof * lambda` with the divisions cleared, so it stays exact
/// when a cycle weighs 0. Such a block is singular unless the zero cycle is a
/// non-minimal one with a single branch vertex.
pub fn block_det<T: Scalar>(block: &WeightedBlock<T>) -> T {
    let s = block.summary();
    let shape = block.shape();
    let m = shape.m();
    let w1 = s.w[0].clone();
    let all = |skip: Option<usize>| {
        s.w.iter()
            .zip(m)
            .enumerate()
            .fold(T::one(), |acc, (j, (w, &mj))| {
                let e = if skip == Some(j) { mj - 1 } else { mj };
                acc * pow(w.clone(), e)
            })
    };
    let mut out = (s.w_c.clone() * s.w_hat[0].clone() + s.w_c2.clone())
        * pow(w1.clone(), shape.n() - 1)
        * all(None);
    for (j, w2) in s.w2.iter().enumerate() {
        out = out + w2.clone() * pow(w1.clone(), shape.n()) * all(Some(j));
    }
    sign(block) * out
}

/// Sum of all cofactors of the block's distance matrix.
pub fn block_cof<T: Scalar>(block: &WeightedBlock<T>) -> T {
    cycle_product(block)
}

/// `w_c w_hat_1 / w_1 + w_c2 / w_1 + sum_j w_j2 / w_j`, equal to `det / cof`.
pub fn block_lambda<T: Scalar>(block: &WeightedBlock<T>) -> Result<T> {
    nonzero_cycles(block)?;
    let s = block.summary();
    let w1 = s.w[0].clone();
    let mut out = (s.w_c.clone() * s.w_hat[0].clone() + s.w_c2.clone()) / w1;
    for (w2, w) in s.w2.iter().zip(&s.w) {
        out = out + w2.clone() / w.clone();
    }
    Ok(out)
}

/// `sum_{j >= 2} w_hat_j / w_j`.
fn tail_correction<T: Scalar>(block: &WeightedBlock<T>) -> T {
    let s = block.summary();
    s.w_hat
        .iter()
        .zip(&s.w)
        .skip(1)
        .fold(T::zero(), |acc, (h, w)| acc + h.clone() / w.clone())
}

fn labelled_column<T: Scalar>(block: &WeightedBlock<T>, values: Vec<T>) -> Matrix<T> {
    Matrix::column(values)
        .with_labels(block.local_names(), Vec::new())
        .expect("one value per vertex")
}

/// `alpha(x)` is the weight of the edge entering `x` over the total weight of
/// that edge's cycle (path edges count toward cycle 1); `u_0` gets
/// `sum_j W_0^(j)/w_j - sum_{j>=2} w_hat_j/w_j`.
pub fn block_alpha<T: Scalar>(block: &WeightedBlock<T>) -> Result<Matrix<T>> {
    nonzero_cycles(block)?;
    let s = block.summary();
    let w = block.weights();
    let mut out = Vec::with_capacity(block.vertex_count());
    let closing = w.branches.iter().zip(&s.w).fold(T::zero(), |acc, (b, wj)| {
        acc + b.closing.clone() / wj.clone()
    });
    out.push(closing - tail_correction(block));
    out.extend(w.path.iter().map(|x| x.clone() / s.w[0].clone()));
    for (b, wj) in w.branches.iter().zip(&s.w) {
        out.extend(b.weights.iter().map(|x| x.clone() / wj.clone()));
    }
    Ok(labelled_column(block, out))
}

/// `beta(x)` is the weight of the edge leaving `x` over the total weight of
/// that edge's cycle; `u_n` gets `sum_j W_1^(j)/w_j - sum_{j>=2} w_hat_j/w_j`.
pub fn block_beta<T: Scalar>(block: &WeightedBlock<T>) -> Result<Matrix<T>> {
    nonzero_cycles(block)?;
    let s = block.summary();
    let w = block.weights();
    let mut out = Vec::with_capacity(block.vertex_count());
    out.extend(w.path.iter().map(|x| x.clone() / s.w[0].clone()));
    let first = w.branches.iter().zip(&s.w).fold(T::zero(), |acc, (b, wj)| {
        acc + b.weights[0].clone() / wj.clone()
    });
    out.push(first - tail_correction(block));
    for (b, wj) in w.branches.iter().zip(&s.w) {
        out.extend(
            b.weights[1..]
                .iter()
                .chain([&b.closing])
                .map(|x| x.clone() / wj.clone()),
        );
    }
    Ok(labelled_column(block, out))
}

/// `L = D_out - A_in + L_hat`.
///
/// `A_in` has `1/w` on every edge, `w` being the weight of the cycle the
/// edge belongs to (cycle 1 for the common path). `D_out` is its row-sum
/// diagonal. `L_hat` moves `sum_{j>=2} 1/w_j` from `(u_n, u_n)` to
/// `(u_n, u_0)`, which balances the column sums.
pub fn block_laplacian_like<T: Scalar>(block: &WeightedBlock<T>) -> Result<Matrix<T>> {
    nonzero_cycles(block)?;
    let s = block.summary();
    let n = block.shape().n();
    let size = block.vertex_count();
    let mut l = Matrix::zeros(size, size);
    let add = |l: &mut Matrix<T>, x: usize, y: usize, v: T| {
        let cur = l.get(x, y).clone();
        l.set(x, y, cur + v);
    };
    let inv_w: Vec<T> = s.w.iter().map(|w| T::one() / w.clone()).collect();
    for i in 0..n {
        add(&mut l, i, i, inv_w[0].clone());
        add(&mut l, i, i + 1, -inv_w[0].clone());
    }
    for (j, &m) in block.shape().m().iter().enumerate() {
        let mut prev = n;
        for pos in 1..=m {
            let at = block.index_of(LocalVertex::Branch { cycle: j, pos });
            add(&mut l, prev, prev, inv_w[j].clone());
            add(&mut l, prev, at, -inv_w[j].clone());
            prev = at;
        }
        add(&mut l, prev, prev, inv_w[j].clone());
        add(&mut l, prev, 0, -inv_w[j].clone());
    }
    let hat = inv_w[1..].iter().fold(T::zero(), |acc, x| acc + x.clone());
    add(&mut l, n, 0, hat.clone());
    add(&mut l, n, n, -hat);
    Ok(l.with_vertex_labels(block.local_names())
        .expect("one row per vertex"))
}

/// Closed-form `D^{-1}`.
pub fn block_inverse<T: Scalar>(block: &WeightedBlock<T>) -> Result<Matrix<T>> {
    make_block_bag(block)?.inverse()
}

pub fn make_block_bag<T: Scalar>(block: &WeightedBlock<T>) -> Result<Bag<T>> {
    Ok(Bag {
        d: block_distance_matrix(block),
        lambda: block_lambda(block)?,
        alpha: block_alpha(block)?,
        beta: block_beta(block)?,
        laplacian_like: block_laplacian_like(block)?,
    })
}

/// Pair sum of all weights around canonical cycle `j`, read directly.
pub fn cycle_pair_sum<T: Scalar>(block: &WeightedBlock<T>, j: usize) -> T {
    pair_sum(&block.cycle_weights(j))
}

/// The same pair sum split as `w_c w_hat_j + w_c2 + w_j2`.
pub fn cycle_pair_sum_split<T: Scalar>(block: &WeightedBlock<T>, j: usize) -> T {
    let s = block.summary();
    s.w_c.clone() * s.w_hat[j].clone() + s.w_c2.clone() + s.w2[j].clone()
}

/// `w_j d(u_n, v_s) + sum_i W_i^(j) d(v_i, v_s) - d(u_n, v_{m_j}) d(u_0, v_s)`
/// for branch vertex `v_s` of canonical cycle `j`, read off `d`. It equals
/// `w_j2` for every `s`.
pub fn branch_pair_sum_from_distances<T: Scalar>(
    block: &WeightedBlock<T>,
    d: &DistanceMatrix<T>,
    j: usize,
    s: usize,
) -> T {
    let n = block.shape().n();
    let m = block.shape().m()[j];
    let at = |pos| block.index_of(LocalVertex::Branch { cycle: j, pos });
    let vs = at(s);
    let mut out = block.summary().w[j].clone() * d.get(n, vs).clone();
    for (i, wi) in block.weights().branches[j].weights.iter().enumerate() {
        out = out + wi.clone() * d.get(at(i + 1), vs).clone();
    }
    out - d.get(n, at(m)).clone() * d.get(0, vs).clone()
}

/// Which LapExp definition a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckFailure<T> {
    Entry {
        row: usize,
        col: usize,
        expected: T,
        got: T,
    },
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },
}

impl<T: fmt::Display> fmt::Display for CheckFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckFailure::Entry {
                row,
                col,
                expected,
                got,
            } => {
                write!(f, "entry ({row}, {col}): expected {expected}, got {got}")
            }
            CheckFailure::Shape { expected, got } => {
                write!(f, "shape {got:?}, expected {expected:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck<T> {
    pub name: &'static str,
    pub failure: Option<CheckFailure<T>>,
}

impl<T> ConditionCheck<T> {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LapExpReport<T> {
    pub side: Side,
    pub checks: Vec<ConditionCheck<T>>,
}

impl<T> LapExpReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ConditionCheck::passed)
    }

    pub fn first_failure(&self) -> Option<&ConditionCheck<T>> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn check(&self, name: &str) -> Option<&ConditionCheck<T>> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn compare<T: Scalar>(
    name: &'static str,
    expected: Option<Matrix<T>>,
    got: Option<Matrix<T>>,
) -> ConditionCheck<T> {
    let failure = match (expected, got) {
        (Some(e), Some(g)) if e.shape() != g.shape() => Some(CheckFailure::Shape {
            expected: e.shape(),
            got: g.shape(),
        }),
        (Some(e), Some(g)) => e.first_mismatch(&g).map(|(row, col)| CheckFailure::Entry {
            row,
            col,
            expected: e.get(row, col).clone(),
            got: g.get(row, col).clone(),
        }),
        // a product was not even defined
        _ => Some(CheckFailure::Shape {
            expected: (0, 0),
            got: (0, 0),
        }),
    };
    ConditionCheck { name, failure }
}

pub const ALPHA_SUM: &str = "alpha^T 1 = 1";
pub const L_ROWS: &str = "L 1 = 0";
pub const ALPHA_D: &str = "alpha^T D = lambda 1^T";
pub const LD_PLUS_I: &str = "L D + I = beta 1^T";
pub const BETA_SUM: &str = "beta^T 1 = 1";
pub const L_COLS: &str = "1^T L = 0";
pub const D_BETA: &str = "D beta = lambda 1";
pub const DL_PLUS_I: &str = "D L + I = 1 alpha^T";

fn one_by_one<T: Scalar>() -> Matrix<T> {
    Matrix::ones(1, 1)
}

/// Checks the four left LapExp conditions:
/// `alpha^T 1 = 1`, `L 1 = 0`, `alpha^T D = lambda 1^T`, `L D + I = beta 1^T`.
pub fn verify_left_lapexp<T: Scalar>(bag: &Bag<T>) -> LapExpReport<T> {
    let n = bag.len();
    let ones = Matrix::<T>::ones(n, 1);
    let at = bag.alpha.transpose();
    let checks = vec![
        compare(ALPHA_SUM, Some(one_by_one()), at.try_mul(&ones).ok()),
        compare(
            L_ROWS,
            Some(Matrix::zeros(n, 1)),
            bag.laplacian_like.try_mul(&ones).ok(),
        ),
        compare(
            ALPHA_D,
            Some(ones.transpose().scale(&bag.lambda)),
            at.try_mul(&bag.d).ok(),
        ),
        compare(
            LD_PLUS_I,
            bag.beta.try_mul(&ones.transpose()).ok(),
            bag.laplacian_like
                .try_mul(&bag.d)
                .and_then(|ld| ld.try_add(&Matrix::identity(n)))
                .ok(),
        ),
    ];
    LapExpReport {
        side: Side::Left,
        checks,
    }
}

/// Checks the four right LapExp conditions:
/// `beta^T 1 = 1`, `1^T L = 0`, `D beta = lambda 1`, `D L + I = 1 alpha^T`.
pub fn verify_right_lapexp<T: Scalar>(bag: &Bag<T>) -> LapExpReport<T> {
    let n = bag.len();
    let ones = Matrix::<T>::ones(n, 1);
    let checks = vec![
        compare(
            BETA_SUM,
            Some(one_by_one()),
            bag.beta.transpose().try_mul(&ones).ok(),
        ),
        compare(
            L_COLS,
            Some(Matrix::zeros(1, n)),
            ones.transpose().try_mul(&bag.laplacian_like).ok(),
        ),
        compare(
            D_BETA,
            Some(ones.scale(&bag.lambda)),
            bag.d.try_mul(&bag.beta).ok(),
        ),
        compare(
            DL_PLUS_I,
            ones.try_mul(&bag.alpha.transpose()).ok(),
            bag.d
                .try_mul(&bag.laplacian_like)
                .and_then(|dl| dl.try_add(&Matrix::identity(n)))
                .ok(),
        ),
    ];
    LapExpReport {
        side: Side::Right,
        checks,
    }
}
