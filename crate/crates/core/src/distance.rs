//! Generalized distance matrices of blocks and cactoid-type digraphs.
//!
//! For arbitrary (possibly negative) weights the piecewise table below is the
//! definition of `d(x, y)`; no path search is involved. The Floyd-Warshall
//! oracle only applies when every weight is positive, where the table agrees
//! with true shortest-path distances.

use thiserror::Error;

use crate::graph::{CactoidGraph, LocalVertex, WeightedBlock};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Square, zero-diagonal matrix whose labels are vertex names.
pub type DistanceMatrix<T> = Matrix<T>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistanceError {
    #[error("shortest paths need positive weights; edge {from} -> {to} has weight {weight}")]
    NonPositiveWeight {
        from: String,
        to: String,
        weight: String,
    },
    #[error("no directed path from {from} to {to}")]
    Unreachable { from: String, to: String },
}

fn prefix_sums<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(xs.len() + 1);
    out.push(T::zero());
    for x in xs {
        let next = out.last().expect("non-empty").clone() + x.clone();
        out.push(next);
    }
    out
}

/// Distance matrix of a single block in canonical vertex order
/// `u_0..u_n, v^(1).., .., v^(r)..` (cycle 1 being the lightest).
pub fn block_distance_matrix<T: Scalar>(block: &WeightedBlock<T>) -> DistanceMatrix<T> {
    let s = block.summary();
    let w = block.weights();
    let path = prefix_sums(&w.path);
    let branch: Vec<Vec<T>> = w.branches.iter().map(|b| prefix_sums(&b.weights)).collect();
    let w1 = &s.w[0];

    let d = |x: LocalVertex, y: LocalVertex| -> T {
        use LocalVertex::{Branch, Path};
        match (x, y) {
            _ if x == y => T::zero(),
            // forward along the common path
            (Path(p), Path(q)) if p < q => path[q].clone() - path[p].clone(),
            // backward: around the lightest cycle
            (Path(q), Path(p)) => w1.clone() - (path[q].clone() - path[p].clone()),
            (Path(p), Branch { cycle: j, pos: q }) => {
                s.w_c.clone() - path[p].clone() + branch[j][q].clone()
            }
            (Branch { cycle: j, pos: q }, Path(p)) => {
                s.w_hat[j].clone() - branch[j][q].clone() + path[p].clone()
            }
            (Branch { cycle: j, pos: p }, Branch { cycle: l, pos: q }) if j == l && p < q => {
                branch[j][q].clone() - branch[j][p].clone()
            }
            (Branch { cycle: j, pos: q }, Branch { cycle: l, pos: p }) if j == l => {
                s.w[j].clone() - (branch[j][q].clone() - branch[j][p].clone())
            }
            (Branch { cycle: j, pos: p }, Branch { cycle: l, pos: q }) => {
                s.w[j].clone() - branch[j][p].clone() + branch[l][q].clone()
            }
        }
    };

    let n = block.vertex_count();
    let verts: Vec<LocalVertex> = (0..n).map(|i| block.vertex_at(i)).collect();
    Matrix::from_fn(n, n, |i, j| d(verts[i], verts[j]))
        .with_vertex_labels(block.local_names())
        .expect("label count equals vertex count")
}

/// The block's distance matrix with branches listed in the caller's cycle
/// order. It is a symmetric permutation of [`block_distance_matrix`].
pub fn block_distance_matrix_input_order<T: Scalar>(block: &WeightedBlock<T>) -> DistanceMatrix<T> {
    block_distance_matrix(block).principal_submatrix(&block.input_vertex_order())
}

/// Distance matrix of a whole cactoid graph in its global vertex order.
///
/// Distances between vertices of different blocks are summed along the
/// unique chain of cut vertices joining them in the block tree.
pub fn graph_distance_matrix<T: Scalar>(graph: &CactoidGraph<T>) -> DistanceMatrix<T> {
    let locals: Vec<DistanceMatrix<T>> = graph.blocks().iter().map(block_distance_matrix).collect();
    // global vertex -> local index inside block t
    let local_index = |t: usize, g: usize| -> usize {
        graph
            .embedding(t)
            .iter()
            .position(|&x| x == g)
            .expect("vertex belongs to block")
    };

    let n = graph.vertex_count();
    let mut out = Matrix::zeros(n, n);
    for src in 0..n {
        let mut dist: Vec<Option<T>> = vec![None; n];
        dist[src] = Some(T::zero());
        let mut seen_block = vec![false; graph.blocks().len()];
        let mut stack = vec![src];
        while let Some(a) = stack.pop() {
            let da = dist[a].clone().expect("visited vertex has a distance");
            for &t in graph.blocks_of(a) {
                if seen_block[t] {
                    continue;
                }
                seen_block[t] = true;
                let la = local_index(t, a);
                for (lc, &c) in graph.embedding(t).iter().enumerate() {
                    if c == a {
                        continue;
                    }
                    dist[c] = Some(da.clone() + locals[t].get(la, lc).clone());
                    if graph.block_index(c) > 1 {
                        stack.push(c);
                    }
                }
            }
        }
        for (dst, d) in dist.into_iter().enumerate() {
            out.set(src, dst, d.expect("block tree is connected"));
        }
    }
    out.with_vertex_labels(graph.vertices().to_vec())
        .expect("label count equals vertex count")
}

/// All-pairs shortest paths over an explicit edge list (Floyd-Warshall).
/// Every weight must be positive.
pub fn floyd_warshall<T: Scalar>(
    labels: &[String],
    edges: &[(usize, usize, T)],
) -> Result<DistanceMatrix<T>, DistanceError> {
    if let Some((x, y, w)) = edges.iter().find(|(_, _, w)| !w.is_positive()) {
        return Err(DistanceError::NonPositiveWeight {
            from: labels[*x].clone(),
            to: labels[*y].clone(),
            weight: w.to_string(),
        });
    }
    let n = labels.len();
    let mut d: Vec<Vec<Option<T>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(T::zero());
    }
    for (x, y, w) in edges {
        let better = match &d[*x][*y] {
            Some(cur) => w < cur,
            None => true,
        };
        if better {
            d[*x][*y] = Some(w.clone());
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = d[i][k].clone() else { continue };
            for j in 0..n {
                let Some(dkj) = &d[k][j] else { continue };
                let via = dik.clone() + dkj.clone();
                if d[i][j].as_ref().is_none_or(|cur| via < *cur) {
                    d[i][j] = Some(via);
                }
            }
        }
    }
    let mut out = Matrix::zeros(n, n);
    for (i, row) in d.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            let v = v.ok_or_else(|| DistanceError::Unreachable {
                from: labels[i].clone(),
                to: labels[j].clone(),
            })?;
            out.set(i, j, v);
        }
    }
    Ok(out
        .with_vertex_labels(labels.to_vec())
        .expect("label count equals vertex count"))
}

/// Shortest-path distances of a positive-weight graph, for cross-checking
/// [`graph_distance_matrix`].
pub fn shortest_path_oracle<T: Scalar>(
    graph: &CactoidGraph<T>,
) -> Result<DistanceMatrix<T>, DistanceError> {
    floyd_warshall(graph.vertices(), &graph.edges())
}

/// [`shortest_path_oracle`] for a single block, in canonical vertex order.
pub fn block_shortest_path_oracle<T: Scalar>(
    block: &WeightedBlock<T>,
) -> Result<DistanceMatrix<T>, DistanceError> {
    floyd_warshall(&block.local_names(), &block.edges())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assemble_graph, Branch, GluedBlock};
    use crate::{parse_rational, Rational};

    type M = Matrix<Rational>;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn qs(xs: &[&str]) -> Vec<Rational> {
        xs.iter().map(|s| q(s)).collect()
    }

    fn unit(n: usize, m: &[usize]) -> WeightedBlock<Rational> {
        WeightedBlock::unit(n, m).unwrap()
    }

    #[test]
    fn figure_matrix() {
        let b = WeightedBlock::from_weights(
            qs(&["2", "1"]),
            vec![
                Branch {
                    weights: qs(&["-1", "-1"]),
                    closing: q("-1"),
                },
                Branch {
                    weights: qs(&["2", "1"]),
                    closing: q("1"),
                },
            ],
        )
        .unwrap();
        let expected = M::from_ints(&[
            [0, 2, 3, 2, 1, 5, 6],
            [-2, 0, 1, 0, -1, 3, 4],
            [-3, -1, 0, -1, -2, 2, 3],
            [-2, 0, 1, 0, -1, 3, 4],
            [-1, 1, 2, 1, 0, 4, 5],
            [2, 4, 5, 4, 3, 0, 1],
            [1, 3, 4, 3, 2, 6, 0],
        ])
        .unwrap();
        let d = block_distance_matrix(&b);
        assert_eq!(d.first_mismatch(&expected), None);
        assert_eq!(
            d.row_labels(),
            ["u0", "u1", "u2", "v1.1", "v2.1", "v1.2", "v2.2"]
        );
    }

    #[test]
    fn unit_triangle() {
        let d = block_distance_matrix(&unit(1, &[1]));
        let expected = M::from_ints(&[[0, 1, 2], [2, 0, 1], [1, 2, 0]]).unwrap();
        assert!(d.same_entries(&expected));
        assert!(block_shortest_path_oracle(&unit(1, &[1]))
            .unwrap()
            .same_entries(&expected));
    }

    #[test]
    fn unit_two_triangles_on_an_edge() {
        // hand enumeration of directed paths on 4 vertices
        let expected =
            M::from_ints(&[[0, 1, 2, 2], [2, 0, 1, 1], [1, 2, 0, 3], [1, 2, 3, 0]]).unwrap();
        let b = unit(1, &[1, 1]);
        assert!(block_distance_matrix(&b).same_entries(&expected));
        assert!(block_shortest_path_oracle(&b)
            .unwrap()
            .same_entries(&expected));
    }

    #[test]
    fn zero_weights_give_zero_matrix() {
        let b = WeightedBlock::from_weights(
            qs(&["0", "0", "0"]),
            vec![Branch {
                weights: qs(&["0", "0"]),
                closing: q("0"),
            }],
        )
        .unwrap();
        assert!(block_distance_matrix(&b).is_zero());
        assert!(matches!(
            block_shortest_path_oracle(&b),
            Err(DistanceError::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn single_block_graph_matches_block() {
        let b = unit(2, &[1, 3]);
        let g = CactoidGraph::single(b.clone());
        assert!(graph_distance_matrix(&g).same_entries(&block_distance_matrix(&b)));
    }

    #[test]
    fn glued_triangles_add_through_cut_vertex() {
        let g = assemble_graph(vec![
            GluedBlock::new("A", unit(1, &[1])).label("v1.1", "c"),
            GluedBlock::new("B", unit(1, &[1])).label("u0", "c"),
        ])
        .unwrap();
        let d = graph_distance_matrix(&g);
        let fw = shortest_path_oracle(&g).unwrap();
        assert_eq!(d.first_mismatch(&fw), None);
        // A.u0 -> B.v1.1: 2 to reach c, then 2 more
        assert_eq!(d.get(0, 4), &q("4"));
        assert_eq!(d.row_labels(), g.vertices());
    }

    #[test]
    fn input_order_is_a_permutation() {
        let b = WeightedBlock::from_weights(
            qs(&["1"]),
            vec![
                Branch {
                    weights: qs(&["5", "1"]),
                    closing: q("1"),
                },
                Branch {
                    weights: qs(&["1"]),
                    closing: q("1"),
                },
            ],
        )
        .unwrap();
        assert_eq!(b.cycle_permutation(), [1, 0]);
        let d = block_distance_matrix_input_order(&b);
        assert_eq!(d.row_labels(), ["u0", "u1", "v1.1", "v2.1", "v1.2"]);
        // same distances, only reordered
        let canon = block_distance_matrix(&b);
        assert_eq!(d.get(2, 4), canon.get(3, 2));
    }
}
