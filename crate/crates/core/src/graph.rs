//! Weighted blocks `dC(n; m_1, ..., m_r)` and cactoid-type digraphs glued
//! from them at cut vertices.
//!
//! A block is a directed common path `u_0 -> ... -> u_n` together with `r`
//! branches `u_n -> v_1^(j) -> ... -> v_{m_j}^(j) -> u_0`. The edge entering
//! `u_i` carries `W_i`, the edge entering `v_i^(j)` carries `W_i^(j)` and the
//! closing edge `v_{m_j}^(j) -> u_0` carries `W_0^(j)`.
//!
//! Blocks are always stored with their cycles sorted by total weight, so the
//! lightest cycle is cycle 0. Local vertex names (`"u3"`, `"v2.1"`) keep
//! referring to the caller's cycle numbering.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid block shape: {0}")]
    Shape(String),
    #[error("{what}: expected {expected} weights, got {got}")]
    LengthMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("block {block:?}: unknown local vertex {name:?}")]
    UnknownLocalVertex { block: String, name: String },
    #[error("block {block:?}: label {label:?} is used for two of its vertices")]
    DuplicateLabel { block: String, label: String },
    #[error("duplicate block id {0:?}")]
    DuplicateBlockId(String),
    #[error("not a cactoid: blocks {first:?} and {second:?} share {shared:?}")]
    NotACactoid {
        first: String,
        second: String,
        shared: Vec<String>,
    },
    #[error("blocks do not form a connected graph")]
    Disconnected,
    #[error("blocks and cut vertices contain a cycle; the block structure must be a tree")]
    BlockCycle,
    #[error("a graph needs at least one block")]
    Empty,
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockShape {
    n: usize,
    m: Vec<usize>,
}

impl BlockShape {
    pub fn new(n: usize, m: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(GraphError::Shape(
                "common path length n must be >= 1".into(),
            ));
        }
        if m.is_empty() {
            return Err(GraphError::Shape("at least one cycle is required".into()));
        }
        if let Some(j) = m.iter().position(|&mj| mj == 0) {
            return Err(GraphError::Shape(format!("branch {} has length 0", j + 1)));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn r(&self) -> usize {
        self.m.len()
    }

    /// `(n + 1) + sum m_j`
    pub fn vertex_count(&self) -> usize {
        self.n + 1 + self.m.iter().sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    /// `W_1^(j) .. W_{m_j}^(j)`
    pub weights: Vec<T>,
    /// `W_0^(j)`, on `v_{m_j}^(j) -> u_0`
    pub closing: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockWeights<T> {
    /// `W_1 .. W_n`
    pub path: Vec<T>,
    pub branches: Vec<Branch<T>>,
}

impl<T: Scalar> BlockWeights<T> {
    fn check(&self, shape: &BlockShape) -> Result<()> {
        if self.path.len() != shape.n {
            return Err(GraphError::LengthMismatch {
                what: "common path".into(),
                expected: shape.n,
                got: self.path.len(),
            });
        }
        if self.branches.len() != shape.r() {
            return Err(GraphError::LengthMismatch {
                what: "cycle list".into(),
                expected: shape.r(),
                got: self.branches.len(),
            });
        }
        for (j, (b, &mj)) in self.branches.iter().zip(&shape.m).enumerate() {
            if b.weights.len() != mj {
                return Err(GraphError::LengthMismatch {
                    what: format!("branch {}", j + 1),
                    expected: mj,
                    got: b.weights.len(),
                });
            }
        }
        Ok(())
    }

    fn all(&self) -> impl Iterator<Item = &T> {
        self.path.iter().chain(
            self.branches
                .iter()
                .flat_map(|b| b.weights.iter().chain([&b.closing])),
        )
    }
}

/// Cycle totals and two-at-a-time product sums of a block.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSummary<T> {
    /// Total weight of the common path.
    pub w_c: T,
    /// Total weight of each branch including its closing edge.
    pub w_hat: Vec<T>,
    /// Total weight of each cycle, `w_c + w_hat[j]`.
    pub w: Vec<T>,
    /// Pairwise product sum over the common path weights.
    pub w_c2: T,
    /// Pairwise product sum over `W_0^(j), W_1^(j), .., W_{m_j}^(j)`.
    pub w2: Vec<T>,
}

impl<T: Scalar> CycleSummary<T> {
    fn compute(weights: &BlockWeights<T>) -> Self {
        let w_c = sum(&weights.path);
        let w_hat: Vec<T> = weights
            .branches
            .iter()
            .map(|b| sum(&b.weights) + b.closing.clone())
            .collect();
        let w = w_hat.iter().map(|h| w_c.clone() + h.clone()).collect();
        let w_c2 = pair_sum(&weights.path);
        let w2 = weights
            .branches
            .iter()
            .map(|b| {
                let mut all = vec![b.closing.clone()];
                all.extend(b.weights.iter().cloned());
                pair_sum(&all)
            })
            .collect();
        Self {
            w_c,
            w_hat,
            w,
            w_c2,
            w2,
        }
    }
}

pub(crate) fn sum<T: Scalar>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, x| acc + x.clone())
}

/// `sum_{s < t} x_s x_t`.
pub fn pair_sum<T: Scalar>(xs: &[T]) -> T {
    let mut prefix = T::zero();
    let mut total = T::zero();
    for x in xs {
        total = total + prefix.clone() * x.clone();
        prefix = prefix + x.clone();
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Clockwise,
    Anticlockwise,
}

/// Pairwise product sum of the weights of an oriented cycle, accumulated
/// from `start` in the given direction through cycle distances.
///
/// `theta[i]` sits on the edge `i-1 -> i` (indices mod `len`). Clockwise:
/// `sum_{i=s}^{s+len-2} theta[i] * d(i, s-1)`. Anticlockwise:
/// `sum_{i=0}^{len-2} theta[s-i] * d(s, s-i-1)`. Both equal
/// [`pair_sum`]`(theta)` for every `start`.
pub fn rotated_pair_sum<T: Scalar>(theta: &[T], start: usize, dir: Direction) -> T {
    let len = theta.len();
    if len < 2 {
        return T::zero();
    }
    // forward distance a -> b on the oriented cycle
    let dist = |a: usize, b: usize| -> T {
        let steps = (b + len - a) % len;
        (1..=steps).fold(T::zero(), |acc, k| acc + theta[(a + k) % len].clone())
    };
    let s = start % len;
    (0..len - 1)
        .map(|i| match dir {
            Direction::Clockwise => {
                let at = (s + i) % len;
                theta[at].clone() * dist(at, (s + len - 1) % len)
            }
            Direction::Anticlockwise => {
                let at = (s + len - i) % len;
                theta[at].clone() * dist(s, (s + 2 * len - i - 1) % len)
            }
        })
        .fold(T::zero(), |acc, v| acc + v)
}

/// Position of a vertex inside a block (canonical cycle indices, 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalVertex {
    /// `u_i`, `0 <= i <= n`
    Path(usize),
    /// `v_pos^(cycle)`, `1 <= pos <= m_cycle`
    Branch { cycle: usize, pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBlock<T> {
    shape: BlockShape,
    weights: BlockWeights<T>,
    summary: CycleSummary<T>,
    cycle_permutation: Vec<usize>,
    branch_offsets: Vec<usize>,
}

/// Sorts the cycles of a block by total weight (stable on ties) and derives
/// its summary.
pub fn canonicalize_block<T: Scalar>(
    shape: BlockShape,
    weights: BlockWeights<T>,
) -> Result<WeightedBlock<T>> {
    weights.check(&shape)?;
    let raw = CycleSummary::compute(&weights);
    let mut order: Vec<usize> = (0..shape.r()).collect();
    order.sort_by(|&a, &b| raw.w[a].partial_cmp(&raw.w[b]).unwrap_or(Ordering::Equal));

    let m = order.iter().map(|&j| shape.m[j]).collect();
    let branches = order.iter().map(|&j| weights.branches[j].clone()).collect();
    let shape = BlockShape { n: shape.n, m };
    let weights = BlockWeights {
        path: weights.path,
        branches,
    };
    let summary = CycleSummary {
        w_hat: order.iter().map(|&j| raw.w_hat[j].clone()).collect(),
        w: order.iter().map(|&j| raw.w[j].clone()).collect(),
        w2: order.iter().map(|&j| raw.w2[j].clone()).collect(),
        w_c: raw.w_c,
        w_c2: raw.w_c2,
    };
    let mut branch_offsets = Vec::with_capacity(shape.r());
    let mut at = shape.n + 1;
    for &mj in &shape.m {
        branch_offsets.push(at);
        at += mj;
    }
    Ok(WeightedBlock {
        shape,
        weights,
        summary,
        cycle_permutation: order,
        branch_offsets,
    })
}

/// `(w_c^(2), [w_j^(2)])` of a canonical block.
pub fn pair_sums<T: Scalar>(block: &WeightedBlock<T>) -> (T, Vec<T>) {
    (block.summary.w_c2.clone(), block.summary.w2.clone())
}

impl<T: Scalar> WeightedBlock<T> {
    /// Builds and canonicalizes a block, reading the shape off the weights.
    pub fn from_weights(path: Vec<T>, branches: Vec<Branch<T>>) -> Result<Self> {
        let shape = BlockShape::new(
            path.len(),
            branches.iter().map(|b| b.weights.len()).collect(),
        )?;
        canonicalize_block(shape, BlockWeights { path, branches })
    }

    /// Every edge weight equal to one.
    pub fn unit(n: usize, m: &[usize]) -> Result<Self> {
        let shape = BlockShape::new(n, m.to_vec())?;
        let weights = BlockWeights {
            path: vec![T::one(); n],
            branches: m
                .iter()
                .map(|&mj| Branch {
                    weights: vec![T::one(); mj],
                    closing: T::one(),
                })
                .collect(),
        };
        canonicalize_block(shape, weights)
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn weights(&self) -> &BlockWeights<T> {
        &self.weights
    }

    pub fn summary(&self) -> &CycleSummary<T> {
        &self.summary
    }

    /// `cycle_permutation()[k]` is the caller's (0-based) index of canonical
    /// cycle `k`.
    pub fn cycle_permutation(&self) -> &[usize] {
        &self.cycle_permutation
    }

    pub fn vertex_count(&self) -> usize {
        self.shape.vertex_count()
    }

    /// Canonical index of the first cycle with total weight zero.
    pub fn zero_cycle(&self) -> Option<usize> {
        self.summary.w.iter().position(|w| w.is_zero())
    }

    pub fn all_weights_positive(&self) -> bool {
        self.weights.all().all(|w| w.is_positive())
    }

    /// Weights in the caller's cycle order.
    pub fn input_weights(&self) -> BlockWeights<T> {
        let mut branches = vec![None; self.shape.r()];
        for (k, &j) in self.cycle_permutation.iter().enumerate() {
            branches[j] = Some(self.weights.branches[k].clone());
        }
        BlockWeights {
            path: self.weights.path.clone(),
            branches: branches.into_iter().map(Option::unwrap).collect(),
        }
    }

    pub fn index_of(&self, v: LocalVertex) -> usize {
        match v {
            LocalVertex::Path(i) => i,
            LocalVertex::Branch { cycle, pos } => self.branch_offsets[cycle] + pos - 1,
        }
    }

    pub fn vertex_at(&self, idx: usize) -> LocalVertex {
        if idx <= self.shape.n {
            return LocalVertex::Path(idx);
        }
        let cycle = self
            .branch_offsets
            .iter()
            .rposition(|&off| off <= idx)
            .expect("index past the common path lies on some branch");
        LocalVertex::Branch {
            cycle,
            pos: idx - self.branch_offsets[cycle] + 1,
        }
    }

    /// Name of a local vertex: `"u{i}"` or `"v{pos}.{j}"` with `j` the
    /// caller's 1-based cycle number.
    pub fn local_name(&self, v: LocalVertex) -> String {
        match v {
            LocalVertex::Path(i) => format!("u{i}"),
            LocalVertex::Branch { cycle, pos } => {
                format!("v{pos}.{}", self.cycle_permutation[cycle] + 1)
            }
        }
    }

    /// Local names in canonical vertex order.
    pub fn local_names(&self) -> Vec<String> {
        (0..self.vertex_count())
            .map(|i| self.local_name(self.vertex_at(i)))
            .collect()
    }

    pub fn parse_local_name(&self, name: &str) -> Option<LocalVertex> {
        if let Some(i) = name.strip_prefix('u') {
            let i: usize = i.parse().ok()?;
            return (i <= self.shape.n).then_some(LocalVertex::Path(i));
        }
        let (pos, j) = name.strip_prefix('v')?.split_once('.')?;
        let (pos, j): (usize, usize) = (pos.parse().ok()?, j.parse().ok()?);
        let cycle = self.cycle_permutation.iter().position(|&c| c + 1 == j)?;
        (1..=self.shape.m[cycle])
            .contains(&pos)
            .then_some(LocalVertex::Branch { cycle, pos })
    }

    /// Directed edges `(from, to, weight)` as local indices.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let n = self.shape.n;
        let mut out = Vec::new();
        for (i, w) in self.weights.path.iter().enumerate() {
            out.push((i, i + 1, w.clone()));
        }
        for (j, b) in self.weights.branches.iter().enumerate() {
            let mut prev = n;
            for (p, w) in b.weights.iter().enumerate() {
                let at = self.index_of(LocalVertex::Branch {
                    cycle: j,
                    pos: p + 1,
                });
                out.push((prev, at, w.clone()));
                prev = at;
            }
            out.push((prev, 0, b.closing.clone()));
        }
        out
    }

    /// Weights around canonical cycle `j`, clockwise from `W_1`:
    /// `W_1..W_n, W_1^(j)..W_{m_j}^(j), W_0^(j)`.
    pub fn cycle_weights(&self, j: usize) -> Vec<T> {
        let b = &self.weights.branches[j];
        self.weights
            .path
            .iter()
            .chain(&b.weights)
            .chain([&b.closing])
            .cloned()
            .collect()
    }

    /// For each vertex in the caller's cycle order, its canonical index.
    /// Conjugating a canonical matrix by this permutation gives the matrix
    /// in the caller's vertex order.
    pub fn input_vertex_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..=self.shape.n).collect();
        let mut by_input: Vec<usize> = (0..self.shape.r()).collect();
        by_input.sort_by_key(|&k| self.cycle_permutation[k]);
        for k in by_input {
            for pos in 1..=self.shape.m[k] {
                order.push(self.index_of(LocalVertex::Branch { cycle: k, pos }));
            }
        }
        order
    }
}

/// A block plus the global labels some of its local vertices are glued to.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedBlock<T> {
    pub id: String,
    pub block: WeightedBlock<T>,
    /// local vertex name -> global label
    pub labels: BTreeMap<String, String>,
}

impl<T: Scalar> GluedBlock<T> {
    pub fn new(id: impl Into<String>, block: WeightedBlock<T>) -> Self {
        Self {
            id: id.into(),
            block,
            labels: BTreeMap::new(),
        }
    }

    pub fn label(mut self, local: impl Into<String>, global: impl Into<String>) -> Self {
        self.labels.insert(local.into(), global.into());
        self
    }
}

/// Blocks glued at cut vertices into a tree of blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct CactoidGraph<T> {
    blocks: Vec<WeightedBlock<T>>,
    block_ids: Vec<String>,
    vertices: Vec<String>,
    embedding: Vec<Vec<usize>>,
    memberships: Vec<Vec<usize>>,
}

/// Glues blocks into a cactoid-type digraph and validates the block tree.
///
/// Global vertex order: blocks in input order, each block's vertices in
/// canonical order, a shared vertex at its first occurrence. Unlabelled
/// vertices get the label `"{block id}.{local name}"`.
pub fn assemble_graph<T: Scalar>(parts: Vec<GluedBlock<T>>) -> Result<CactoidGraph<T>> {
    if parts.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut vertices: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut embedding = Vec::with_capacity(parts.len());
    let mut memberships: Vec<Vec<usize>> = Vec::new();
    let mut block_ids: Vec<String> = Vec::with_capacity(parts.len());

    for (t, part) in parts.iter().enumerate() {
        if block_ids.contains(&part.id) {
            return Err(GraphError::DuplicateBlockId(part.id.clone()));
        }
        block_ids.push(part.id.clone());
        let mut assigned: Vec<Option<String>> = vec![None; part.block.vertex_count()];
        for (local, global) in &part.labels {
            let v = part.block.parse_local_name(local).ok_or_else(|| {
                GraphError::UnknownLocalVertex {
                    block: part.id.clone(),
                    name: local.clone(),
                }
            })?;
            assigned[part.block.index_of(v)] = Some(global.clone());
        }
        let mut local_to_global = Vec::with_capacity(assigned.len());
        for (i, label) in assigned.into_iter().enumerate() {
            let label = label.unwrap_or_else(|| {
                format!(
                    "{}.{}",
                    part.id,
                    part.block.local_name(part.block.vertex_at(i))
                )
            });
            let g = *index.entry(label.clone()).or_insert_with(|| {
                vertices.push(label.clone());
                memberships.push(Vec::new());
                vertices.len() - 1
            });
            if memberships[g].last() == Some(&t) {
                return Err(GraphError::DuplicateLabel {
                    block: part.id.clone(),
                    label,
                });
            }
            memberships[g].push(t);
            local_to_global.push(g);
        }
        embedding.push(local_to_global);
    }

    let b = parts.len();
    let mut shared: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (v, blocks) in memberships.iter().enumerate() {
        for (x, &s) in blocks.iter().enumerate() {
            for &t in &blocks[x + 1..] {
                shared.entry((s, t)).or_default().push(v);
            }
        }
    }
    if let Some((&(s, t), vs)) = shared.iter().find(|(_, vs)| vs.len() >= 2) {
        return Err(GraphError::NotACactoid {
            first: block_ids[s].clone(),
            second: block_ids[t].clone(),
            shared: vs.iter().map(|&v| vertices[v].clone()).collect(),
        });
    }

    // Bipartite block / cut-vertex graph must be a tree.
    let mut parent: Vec<usize> = (0..b).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }
    let mut nodes = b;
    let mut edges = 0;
    for blocks in memberships.iter().filter(|bs| bs.len() >= 2) {
        nodes += 1;
        edges += blocks.len();
        for &t in &blocks[1..] {
            let (x, y) = (find(&mut parent, blocks[0]), find(&mut parent, t));
            parent[x] = y;
        }
    }
    let root = find(&mut parent, 0);
    if (1..b).any(|t| find(&mut parent, t) != root) {
        return Err(GraphError::Disconnected);
    }
    if edges != nodes - 1 {
        return Err(GraphError::BlockCycle);
    }

    Ok(CactoidGraph {
        blocks: parts.into_iter().map(|p| p.block).collect(),
        block_ids,
        vertices,
        embedding,
        memberships,
    })
}

impl<T: Scalar> CactoidGraph<T> {
    /// A graph with one block and no gluing.
    pub fn single(block: WeightedBlock<T>) -> Self {
        assemble_graph(vec![GluedBlock::new("B1", block)])
            .expect("a single block is always a cactoid")
    }

    pub fn blocks(&self) -> &[WeightedBlock<T>] {
        &self.blocks
    }

    pub fn block_ids(&self) -> &[String] {
        &self.block_ids
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// For block `t`, the global index of each local (canonical) vertex.
    pub fn embedding(&self, t: usize) -> &[usize] {
        &self.embedding[t]
    }

    pub fn embeddings(&self) -> &[Vec<usize>] {
        &self.embedding
    }

    /// Blocks containing global vertex `v`, ascending.
    pub fn blocks_of(&self, v: usize) -> &[usize] {
        &self.memberships[v]
    }

    /// Block index `bi(v)`: the number of blocks containing `v`.
    pub fn block_index(&self, v: usize) -> usize {
        self.memberships[v].len()
    }

    pub fn cut_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.block_index(v) >= 2)
            .collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    /// Directed edges as global indices.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        self.blocks
            .iter()
            .zip(&self.embedding)
            .flat_map(|(b, emb)| {
                b.edges()
                    .into_iter()
                    .map(move |(x, y, w)| (emb[x], emb[y], w))
            })
            .collect()
    }

    pub fn all_weights_positive(&self) -> bool {
        self.blocks.iter().all(WeightedBlock::all_weights_positive)
    }
}
