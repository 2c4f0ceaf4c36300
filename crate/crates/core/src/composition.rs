//! Whole-graph bags, determinants, cofactor sums and inverses assembled from
//! the per-block closed forms.

use rayon::prelude::*;
use thiserror::Error;

use crate::distance::graph_distance_matrix;
use crate::formulas::{
    block_cof, block_det, block_lambda, make_block_bag, verify_left_lapexp, verify_right_lapexp,
    Bag, FormulaError, LapExpReport, Side,
};
use crate::graph::CactoidGraph;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositionError {
    #[error("block {block}: cycle {cycle} has total weight zero")]
    ZeroCycleWeight { block: String, cycle: usize },
    #[error("composed lambda = 0, the distance matrix is singular")]
    Singular,
    #[error("misaligned composition input: {0}")]
    Misaligned(String),
    #[error("block {block}: bag fails {side:?} condition {condition}: {detail}")]
    BagRejected {
        block: String,
        side: Side,
        condition: &'static str,
        detail: String,
    },
    #[error("block {block}: bag distance matrix differs from the graph's at local ({row}, {col})")]
    DistanceMismatch {
        block: String,
        row: usize,
        col: usize,
    },
}

pub type Result<T, E = CompositionError> = std::result::Result<T, E>;

fn lift(block: &str, e: FormulaError) -> CompositionError {
    match e {
        FormulaError::ZeroCycleWeight { cycle } => CompositionError::ZeroCycleWeight {
            block: block.to_owned(),
            cycle,
        },
        FormulaError::Singular => CompositionError::Singular,
    }
}

/// A graph with one bag per block and, for each block, the global index of
/// every local row.
#[derive(Debug, Clone)]
pub struct CompositionInput<'g, T> {
    pub graph: &'g CactoidGraph<T>,
    pub block_bags: Vec<Bag<T>>,
    pub embedding: Vec<Vec<usize>>,
}

impl<'g, T: Scalar> CompositionInput<'g, T> {
    /// Builds the closed-form bag of every block (in parallel).
    pub fn from_graph(graph: &'g CactoidGraph<T>) -> Result<Self> {
        let block_bags = graph
            .blocks()
            .par_iter()
            .zip(graph.block_ids())
            .map(|(b, id)| make_block_bag(b).map_err(|e| lift(id, e)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            graph,
            block_bags,
            embedding: graph.embeddings().to_vec(),
        })
    }
}

fn reject<T: Scalar>(block: &str, report: &LapExpReport<T>) -> Result<()> {
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(CompositionError::BagRejected {
            block: block.to_owned(),
            side: report.side,
            condition: c.name,
            detail: c
                .failure
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default(),
        }),
    }
}

/// Composes verified block bags into the bag of the whole graph:
/// `lambda = sum lambda_t`, `alpha(v) = sum_t alpha_t(v) - (bi(v) - 1)` with
/// `alpha_t` zero outside block `t` (same for `beta`), and `L` the sum of the
/// zero-padded block matrices.
pub fn compose_bags<T: Scalar>(input: &CompositionInput<'_, T>) -> Result<Bag<T>> {
    let graph = input.graph;
    let b = graph.blocks().len();
    if input.block_bags.len() != b || input.embedding.len() != b {
        return Err(CompositionError::Misaligned(format!(
            "{b} blocks, {} bags, {} embeddings",
            input.block_bags.len(),
            input.embedding.len()
        )));
    }
    let size = graph.vertex_count();
    let d = graph_distance_matrix(graph);

    for (t, (bag, emb)) in input.block_bags.iter().zip(&input.embedding).enumerate() {
        let id = &graph.block_ids()[t];
        if bag.len() != emb.len() || emb.iter().any(|&g| g >= size) {
            return Err(CompositionError::Misaligned(format!(
                "block {id}: {} local rows, embedding of length {}",
                bag.len(),
                emb.len()
            )));
        }
        if let Some((row, col)) = d.principal_submatrix(emb).first_mismatch(&bag.d) {
            return Err(CompositionError::DistanceMismatch {
                block: id.clone(),
                row,
                col,
            });
        }
        reject(id, &verify_left_lapexp(bag))?;
        reject(id, &verify_right_lapexp(bag))?;
    }

    let mut lambda = T::zero();
    let mut alpha = vec![T::zero(); size];
    let mut beta = vec![T::zero(); size];
    let mut l = Matrix::<T>::zeros(size, size);
    for (bag, emb) in input.block_bags.iter().zip(&input.embedding) {
        lambda = lambda + bag.lambda.clone();
        for (x, &gx) in emb.iter().enumerate() {
            alpha[gx] = alpha[gx].clone() + bag.alpha.get(x, 0).clone();
            beta[gx] = beta[gx].clone() + bag.beta.get(x, 0).clone();
            for (y, &gy) in emb.iter().enumerate() {
                l.set(
                    gx,
                    gy,
                    l.get(gx, gy).clone() + bag.laplacian_like.get(x, y).clone(),
                );
            }
        }
    }
    for v in 0..size {
        let extra = T::from_int(graph.block_index(v) as i64 - 1);
        alpha[v] = alpha[v].clone() - extra.clone();
        beta[v] = beta[v].clone() - extra;
    }

    let labels = graph.vertices().to_vec();
    let column = |xs: Vec<T>| {
        Matrix::column(xs)
            .with_labels(labels.clone(), Vec::new())
            .expect("one value per vertex")
    };
    Ok(Bag {
        lambda,
        alpha: column(alpha),
        beta: column(beta),
        laplacian_like: l
            .with_vertex_labels(labels.clone())
            .expect("one row per vertex"),
        d,
    })
}

/// Bag of the whole graph from the closed forms of its blocks.
pub fn graph_bag<T: Scalar>(graph: &CactoidGraph<T>) -> Result<Bag<T>> {
    compose_bags(&CompositionInput::from_graph(graph)?)
}

/// `prod_t cof D_t`.
pub fn graph_cof<T: Scalar>(graph: &CactoidGraph<T>) -> T {
    graph
        .blocks()
        .iter()
        .fold(T::one(), |acc, b| acc * block_cof(b))
}

/// `sum_i det D_i prod_{j != i} cof D_j`; valid even when some cofactor
/// sum vanishes.
pub fn graph_det<T: Scalar>(graph: &CactoidGraph<T>) -> T {
    let dets: Vec<T> = graph.blocks().iter().map(block_det).collect();
    let cofs: Vec<T> = graph.blocks().iter().map(block_cof).collect();
    (0..dets.len()).fold(T::zero(), |acc, i| {
        let rest = cofs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(T::one(), |p, (_, c)| p * c.clone());
        acc + dets[i].clone() * rest
    })
}

/// `sum_t lambda_t`.
pub fn graph_lambda<T: Scalar>(graph: &CactoidGraph<T>) -> Result<T> {
    graph
        .blocks()
        .iter()
        .zip(graph.block_ids())
        .try_fold(T::zero(), |acc, (b, id)| {
            Ok(acc + block_lambda(b).map_err(|e| lift(id, e))?)
        })
}

/// Closed-form inverse of the whole-graph distance matrix.
pub fn graph_inverse<T: Scalar>(graph: &CactoidGraph<T>) -> Result<Matrix<T>> {
    graph_bag(graph)?
        .inverse()
        .map_err(|_| CompositionError::Singular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::block_inverse;
    use crate::graph::{assemble_graph, Branch, GluedBlock, WeightedBlock};
    use crate::linalg::{cofactor_sum, det, inverse};
    use crate::{parse_rational, Rational};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn triangle() -> WeightedBlock<Rational> {
        WeightedBlock::unit(1, &[1]).unwrap()
    }

    fn two_triangles() -> CactoidGraph<Rational> {
        assemble_graph(vec![
            GluedBlock::new("A", triangle()).label("v1.1", "c"),
            GluedBlock::new("B", triangle()).label("u0", "c"),
        ])
        .unwrap()
    }

    #[test]
    fn single_block_is_unchanged() {
        let b = WeightedBlock::<Rational>::unit(2, &[1, 3]).unwrap();
        let g = CactoidGraph::single(b.clone());
        let composed = graph_bag(&g).unwrap();
        let direct = make_block_bag(&b).unwrap();
        assert_eq!(composed.lambda, direct.lambda);
        assert!(composed.alpha.same_entries(&direct.alpha));
        assert!(composed.beta.same_entries(&direct.beta));
        assert!(composed.laplacian_like.same_entries(&direct.laplacian_like));
        assert!(graph_inverse(&g)
            .unwrap()
            .same_entries(&block_inverse(&b).unwrap()));
    }

    #[test]
    fn two_glued_triangles() {
        let g = two_triangles();
        let bag = graph_bag(&g).unwrap();
        assert_eq!(bag.lambda, q("2"));
        let c = g.position("c").unwrap();
        for v in 0..5 {
            let expected = if v == c { q("-1/3") } else { q("1/3") };
            assert_eq!(bag.alpha.get(v, 0), &expected);
        }
        assert!(verify_left_lapexp(&bag).passed());
        assert!(verify_right_lapexp(&bag).passed());

        assert_eq!(graph_cof(&g), q("81"));
        assert_eq!(graph_det(&g), q("162"));
        assert_eq!(det(&bag.d).unwrap(), q("162"));
        assert_eq!(cofactor_sum(&bag.d).unwrap(), q("81"));
        assert_eq!(graph_inverse(&g).unwrap(), inverse(&bag.d).unwrap());
    }

    #[test]
    fn chain_of_three() {
        let g = assemble_graph(vec![
            GluedBlock::new("A", triangle()).label("u1", "x"),
            GluedBlock::new("B", triangle())
                .label("u0", "x")
                .label("u1", "y"),
            GluedBlock::new("C", triangle()).label("v1.1", "y"),
        ])
        .unwrap();
        assert_eq!(graph_lambda(&g).unwrap(), q("3"));
        let bag = graph_bag(&g).unwrap();
        assert!(verify_left_lapexp(&bag).passed());
        assert_eq!(graph_det(&g), det(&bag.d).unwrap());
    }

    #[test]
    fn composed_lambda_zero_is_singular() {
        // triangle 1, 1, -1 has lambda -1 and cancels the unit triangle
        let neg = WeightedBlock::from_weights(
            vec![q("1")],
            vec![Branch {
                weights: vec![q("1")],
                closing: q("-1"),
            }],
        )
        .unwrap();
        let g = assemble_graph(vec![
            GluedBlock::new("A", triangle()).label("u1", "c"),
            GluedBlock::new("B", neg).label("u0", "c"),
        ])
        .unwrap();
        assert_eq!(graph_lambda(&g).unwrap(), q("0"));
        assert_eq!(det(&graph_distance_matrix(&g)).unwrap(), q("0"));
        assert_eq!(graph_det(&g), q("0"));
        assert_eq!(graph_inverse(&g), Err(CompositionError::Singular));
    }

    #[test]
    fn zero_cycle_names_the_block() {
        let zero = WeightedBlock::from_weights(
            vec![q("1")],
            vec![Branch {
                weights: vec![q("1")],
                closing: q("-2"),
            }],
        )
        .unwrap();
        let g = assemble_graph(vec![
            GluedBlock::new("A", triangle()).label("u1", "c"),
            GluedBlock::new("Z", zero).label("u0", "c"),
        ])
        .unwrap();
        assert_eq!(graph_det(&g), q("0"));
        assert_eq!(
            graph_inverse(&g),
            Err(CompositionError::ZeroCycleWeight {
                block: "Z".into(),
                cycle: 1
            })
        );
    }

    #[test]
    fn misaligned_and_tampered_inputs() {
        let g = two_triangles();
        let mut input = CompositionInput::from_graph(&g).unwrap();
        input.embedding.pop();
        assert!(matches!(
            compose_bags(&input),
            Err(CompositionError::Misaligned(_))
        ));

        let mut input = CompositionInput::from_graph(&g).unwrap();
        input.block_bags[1].alpha.set(0, 0, q("1"));
        assert!(matches!(
            compose_bags(&input),
            Err(CompositionError::BagRejected {
                side: Side::Left,
                ..
            })
        ));

        let mut input = CompositionInput::from_graph(&g).unwrap();
        input.block_bags[0].d.set(0, 1, q("7"));
        assert_eq!(
            compose_bags(&input).unwrap_err(),
            CompositionError::DistanceMismatch {
                block: "A".into(),
                row: 0,
                col: 1
            }
        );
    }
}
