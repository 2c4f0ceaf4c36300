//! Seeded fuzzing of every closed form against the brute-force oracles.
//!
//! Case `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so a
//! case's inputs depend only on `(seed, i, bounds)`, never on scheduling.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::composition::{graph_bag, graph_cof, graph_det, graph_lambda};
use crate::distance::{
    block_distance_matrix, block_distance_matrix_input_order, block_shortest_path_oracle,
    graph_distance_matrix, shortest_path_oracle,
};
use crate::formulas::{
    block_cof, block_det, block_inverse, block_lambda, branch_pair_sum_from_distances,
    cycle_pair_sum, cycle_pair_sum_split, make_block_bag, verify_left_lapexp, verify_right_lapexp,
    CheckFailure, LapExpReport,
};
use crate::graph::{
    assemble_graph, pair_sum, rotated_pair_sum, Branch, CactoidGraph, Direction, GluedBlock,
    WeightedBlock,
};
use crate::linalg::{cofactor_sum, det, inverse, Matrix};
use crate::Rational;

/// Shape and weight ranges for generated inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzBounds {
    pub max_n: usize,
    pub max_r: usize,
    pub max_m: usize,
    pub numerators: (i64, i64),
    pub denominators: (i64, i64),
    /// Blocks per generated graph.
    pub max_blocks: usize,
    /// Shape limits for blocks inside generated graphs.
    pub graph_max_n: usize,
    pub graph_max_r: usize,
    pub graph_max_m: usize,
    /// Keep blocks with a zero-weight cycle and force one now and then.
    pub include_degenerate: bool,
}

impl Default for FuzzBounds {
    fn default() -> Self {
        FuzzBounds {
            max_n: 5,
            max_r: 4,
            max_m: 4,
            numerators: (-5, 5),
            denominators: (1, 4),
            max_blocks: 5,
            graph_max_n: 3,
            graph_max_r: 3,
            graph_max_m: 3,
            include_degenerate: false,
        }
    }
}

impl FuzzBounds {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("max_n", self.max_n),
            ("max_r", self.max_r),
            ("max_m", self.max_m),
            ("max_blocks", self.max_blocks),
            ("graph_max_n", self.graph_max_n),
            ("graph_max_r", self.graph_max_r),
            ("graph_max_m", self.graph_max_m),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(format!("{name} must be at least 1"));
        }
        let (lo, hi) = self.numerators;
        if lo > hi {
            return Err(format!("empty numerator range [{lo}, {hi}]"));
        }
        if lo == 0 && hi == 0 {
            return Err("numerator range [0, 0] only yields zero-weight cycles".into());
        }
        let (lo, hi) = self.denominators;
        if lo < 1 || lo > hi {
            return Err(format!(
                "denominator range [{lo}, {hi}] must be positive and non-empty"
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub cases: usize,
    pub bounds: FuzzBounds,
    /// Worker threads; 1 runs in the calling thread.
    pub jobs: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 1,
            cases: 100,
            bounds: FuzzBounds::default(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryMismatch {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirstFailure {
    pub case: usize,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<EntryMismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityRecord {
    pub name: &'static str,
    pub status: Status,
    pub checked: usize,
    pub skipped: usize,
    pub failed: usize,
    pub first_failure: Option<FirstFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub status: Status,
    pub cases: usize,
    pub blocks: usize,
    pub degenerate_blocks: usize,
    pub positive_blocks: usize,
    pub graphs: usize,
    pub identities: usize,
    pub failed_identities: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub records: Vec<IdentityRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.status == Status::Pass
    }

    pub fn record(&self, name: &str) -> Option<&IdentityRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    /// Folds per-item outcomes into records, in the order names first appear.
    pub fn from_outcomes(cases: usize, outcomes: &[CaseOutcome]) -> Self {
        let mut records: Vec<IdentityRecord> = Vec::new();
        let mut summary = Summary {
            status: Status::Pass,
            cases,
            blocks: 0,
            degenerate_blocks: 0,
            positive_blocks: 0,
            graphs: 0,
            identities: 0,
            failed_identities: 0,
        };
        for case in outcomes {
            summary.blocks += case.blocks;
            summary.degenerate_blocks += case.degenerate_blocks;
            summary.positive_blocks += case.positive_blocks;
            summary.graphs += case.graphs;
            for (name, outcome) in &case.checks {
                let at = match records.iter().position(|r| r.name == *name) {
                    Some(i) => i,
                    None => {
                        records.push(IdentityRecord {
                            name,
                            status: Status::Pass,
                            checked: 0,
                            skipped: 0,
                            failed: 0,
                            first_failure: None,
                        });
                        records.len() - 1
                    }
                };
                let rec = &mut records[at];
                match outcome {
                    Outcome::Skip => rec.skipped += 1,
                    Outcome::Pass => rec.checked += 1,
                    Outcome::Fail(detail, mismatch) => {
                        rec.checked += 1;
                        rec.failed += 1;
                        rec.status = Status::Fail;
                        if rec.first_failure.is_none() {
                            rec.first_failure = Some(FirstFailure {
                                case: case.case,
                                detail: detail.clone(),
                                mismatch: mismatch.clone(),
                            });
                        }
                    }
                }
            }
        }
        summary.identities = records.len();
        summary.failed_identities = records.iter().filter(|r| r.status == Status::Fail).count();
        if summary.failed_identities > 0 {
            summary.status = Status::Fail;
        }
        VerificationReport { records, summary }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Skip,
    Fail(String, Option<EntryMismatch>),
}

/// Everything checked for one fuzz case.
#[derive(Debug, Clone, Default)]
pub struct CaseOutcome {
    pub case: usize,
    pub blocks: usize,
    pub degenerate_blocks: usize,
    pub positive_blocks: usize,
    pub graphs: usize,
    pub checks: Vec<(&'static str, Outcome)>,
}

pub const BLOCK_DET: &str = "block det closed form = det oracle";
pub const BLOCK_COF: &str = "block cof closed form = cofactor oracle";
pub const BLOCK_LAMBDA_COF: &str = "block lambda * cof = det";
pub const BLOCK_ZERO_CYCLE: &str = "zero-weight minimal cycle or multi-vertex branch gives det 0";
pub const BLOCK_INVERSE: &str = "block inverse closed form = inverse oracle";
pub const BLOCK_SINGULAR: &str = "block lambda = 0 gives det 0";
pub const BLOCK_LEFT: &str = "block left LapExp conditions";
pub const BLOCK_RIGHT: &str = "block right LapExp conditions";
pub const BLOCK_PERMUTATION: &str = "det invariant under cycle order";
pub const CYCLE_PAIR_SPLIT: &str = "cycle pair sum = w_c w_hat_j + w_c2 + w_j2";
pub const BRANCH_PAIR_DIST: &str = "branch pair sum from distances";
pub const ROTATION_CW: &str = "clockwise rotated pair sum";
pub const ROTATION_ACW: &str = "anticlockwise rotated pair sum";
pub const METRIC_TABLE: &str = "positive weights: table = Floyd-Warshall";
pub const METRIC_TRIANGLE: &str = "positive weights: triangle inequality";
pub const GRAPH_RESTRICTION: &str = "graph D restricted to a block = block D";
pub const GRAPH_COF: &str = "graph cof = product of block cofs = oracle";
pub const GRAPH_DET: &str = "graph det composition = det oracle";
pub const GRAPH_LAMBDA: &str = "composed lambda = sum of block lambdas";
pub const GRAPH_LEFT: &str = "composed bag left LapExp conditions";
pub const GRAPH_RIGHT: &str = "composed bag right LapExp conditions";
pub const GRAPH_INVERSE: &str = "graph inverse closed form * D = I";
pub const GRAPH_SINGULAR: &str = "graph lambda = 0 gives det 0";
pub const GRAPH_METRIC: &str = "positive graph: distances = Floyd-Warshall";

fn eq_scalar(expected: &Rational, got: &Rational, what: &str) -> Outcome {
    if expected == got {
        Outcome::Pass
    } else {
        Outcome::Fail(format!("{what}: expected {expected}, got {got}"), None)
    }
}

fn eq_matrix(expected: &Matrix<Rational>, got: &Matrix<Rational>, what: &str) -> Outcome {
    if expected.shape() != got.shape() {
        return Outcome::Fail(
            format!("{what}: shape {:?} vs {:?}", expected.shape(), got.shape()),
            None,
        );
    }
    match expected.first_mismatch(got) {
        None => Outcome::Pass,
        Some((row, col)) => Outcome::Fail(
            what.to_owned(),
            Some(EntryMismatch {
                row,
                col,
                expected: expected.get(row, col).to_string(),
                got: got.get(row, col).to_string(),
            }),
        ),
    }
}

fn lapexp_outcome(report: &LapExpReport<Rational>) -> Outcome {
    match report.first_failure() {
        None => Outcome::Pass,
        Some(c) => {
            let mismatch = match &c.failure {
                Some(CheckFailure::Entry {
                    row,
                    col,
                    expected,
                    got,
                }) => Some(EntryMismatch {
                    row: *row,
                    col: *col,
                    expected: expected.to_string(),
                    got: got.to_string(),
                }),
                _ => None,
            };
            Outcome::Fail(c.name.to_owned(), mismatch)
        }
    }
}

fn all_pass(outcomes: impl IntoIterator<Item = Outcome>) -> Outcome {
    outcomes
        .into_iter()
        .find(|o| matches!(o, Outcome::Fail(..)))
        .unwrap_or(Outcome::Pass)
}

fn weight(rng: &mut ChaCha8Rng, bounds: &FuzzBounds) -> Rational {
    let num = rng.gen_range(bounds.numerators.0..=bounds.numerators.1);
    let den = rng.gen_range(bounds.denominators.0..=bounds.denominators.1);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn positive_weight(rng: &mut ChaCha8Rng) -> Rational {
    // {1/3, .., 5}
    Rational::new(
        BigInt::from(rng.gen_range(1..=5)),
        BigInt::from(rng.gen_range(1..=3)),
    )
}

fn random_shape(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_r: usize,
    max_m: usize,
) -> (usize, Vec<usize>) {
    let n = rng.gen_range(1..=max_n);
    let r = rng.gen_range(1..=max_r);
    (n, (0..r).map(|_| rng.gen_range(1..=max_m)).collect())
}

fn build(n: usize, m: &[usize], mut w: impl FnMut() -> Rational) -> WeightedBlock<Rational> {
    let path = (0..n).map(|_| w()).collect();
    let branches = m
        .iter()
        .map(|&mj| Branch {
            weights: (0..mj).map(|_| w()).collect(),
            closing: w(),
        })
        .collect();
    WeightedBlock::from_weights(path, branches).expect("generated shapes are valid")
}

/// A block of the given shape; resampled until every cycle weight is nonzero
/// unless degenerate blocks are allowed, in which case one cycle is forced
/// to weigh zero a quarter of the time.
fn random_block(
    rng: &mut ChaCha8Rng,
    bounds: &FuzzBounds,
    n: usize,
    m: &[usize],
) -> WeightedBlock<Rational> {
    loop {
        let mut block = build(n, m, || weight(rng, bounds));
        if bounds.include_degenerate {
            if rng.gen_ratio(1, 4) {
                let j = rng.gen_range(0..m.len());
                let mut w = block.input_weights();
                let total = block.summary().w[block
                    .cycle_permutation()
                    .iter()
                    .position(|&c| c == j)
                    .unwrap()]
                .clone();
                w.branches[j].closing = w.branches[j].closing.clone() - total;
                block = WeightedBlock::from_weights(w.path, w.branches).expect("same shape");
            }
            return block;
        }
        if block.zero_cycle().is_none() {
            return block;
        }
    }
}

/// A zero cycle kills the determinant when it is the minimal cycle or its
/// branch has at least two vertices. A lone branch vertex on a heavier cycle
/// does not.
fn forces_zero_det(block: &WeightedBlock<Rational>) -> bool {
    let s = block.summary();
    s.w[0].is_zero()
        || s.w
            .iter()
            .zip(block.shape().m())
            .any(|(w, &m)| w.is_zero() && m >= 2)
}

fn check_block(block: &WeightedBlock<Rational>, out: &mut Vec<(&'static str, Outcome)>) {
    let d = block_distance_matrix(block);
    let det_oracle = det(&d).expect("square");
    let det_closed = block_det(block);
    out.push((BLOCK_DET, eq_scalar(&det_oracle, &det_closed, "det")));
    let cof_oracle = cofactor_sum(&d).expect("square");
    out.push((BLOCK_COF, eq_scalar(&cof_oracle, &block_cof(block), "cof")));

    let permuted = det(&block_distance_matrix_input_order(block)).expect("square");
    out.push((
        BLOCK_PERMUTATION,
        eq_scalar(&det_oracle, &permuted, "det in input order"),
    ));

    let s = block.summary();
    let mut split = Vec::new();
    let mut branch = Vec::new();
    let mut cw = Vec::new();
    let mut acw = Vec::new();
    for j in 0..block.shape().r() {
        split.push(eq_scalar(
            &cycle_pair_sum(block, j),
            &cycle_pair_sum_split(block, j),
            "pair sum",
        ));
        for pos in 1..=block.shape().m()[j] {
            branch.push(eq_scalar(
                &s.w2[j],
                &branch_pair_sum_from_distances(block, &d, j, pos),
                "branch pair sum",
            ));
        }
        let theta = block.cycle_weights(j);
        let direct = pair_sum(&theta);
        for start in 0..theta.len() {
            cw.push(eq_scalar(
                &direct,
                &rotated_pair_sum(&theta, start, Direction::Clockwise),
                "clockwise",
            ));
            acw.push(eq_scalar(
                &direct,
                &rotated_pair_sum(&theta, start, Direction::Anticlockwise),
                "anticlockwise",
            ));
        }
    }
    out.push((CYCLE_PAIR_SPLIT, all_pass(split)));
    out.push((BRANCH_PAIR_DIST, all_pass(branch)));
    out.push((ROTATION_CW, all_pass(cw)));
    out.push((ROTATION_ACW, all_pass(acw)));

    if block.zero_cycle().is_some() {
        let forced = if forces_zero_det(block) {
            eq_scalar(&Rational::zero(), &det_oracle, "det with a zero cycle")
        } else {
            Outcome::Skip
        };
        out.push((BLOCK_ZERO_CYCLE, forced));
        for name in [
            BLOCK_LAMBDA_COF,
            BLOCK_INVERSE,
            BLOCK_SINGULAR,
            BLOCK_LEFT,
            BLOCK_RIGHT,
        ] {
            out.push((name, Outcome::Skip));
        }
        return;
    }
    out.push((BLOCK_ZERO_CYCLE, Outcome::Skip));
    let lambda = block_lambda(block).expect("no zero cycle");
    out.push((
        BLOCK_LAMBDA_COF,
        eq_scalar(&det_oracle, &(lambda.clone() * cof_oracle), "lambda * cof"),
    ));

    let bag = make_block_bag(block).expect("no zero cycle");
    out.push((BLOCK_LEFT, lapexp_outcome(&verify_left_lapexp(&bag))));
    out.push((BLOCK_RIGHT, lapexp_outcome(&verify_right_lapexp(&bag))));

    if lambda.is_zero() {
        out.push((BLOCK_INVERSE, Outcome::Skip));
        out.push((
            BLOCK_SINGULAR,
            eq_scalar(&Rational::zero(), &det_oracle, "det with lambda = 0"),
        ));
        return;
    }
    out.push((BLOCK_SINGULAR, Outcome::Skip));
    let closed = block_inverse(block).expect("lambda is nonzero");
    let oracle = match inverse(&d) {
        Ok(inv) => inv,
        Err(e) => {
            out.push((BLOCK_INVERSE, Outcome::Fail(format!("oracle: {e}"), None)));
            return;
        }
    };
    out.push((
        BLOCK_INVERSE,
        all_pass([
            eq_matrix(&oracle, &closed, "inverse"),
            eq_matrix(&Matrix::identity(d.rows()), &(&closed * &d), "inverse * D"),
        ]),
    ));
}

fn check_metric(block: &WeightedBlock<Rational>, out: &mut Vec<(&'static str, Outcome)>) {
    let d = block_distance_matrix(block);
    let outcome = match block_shortest_path_oracle(block) {
        Ok(fw) => eq_matrix(&fw, &d, "table vs shortest paths"),
        Err(e) => Outcome::Fail(e.to_string(), None),
    };
    out.push((METRIC_TABLE, outcome));
    let n = d.rows();
    let mut tri = Outcome::Pass;
    'outer: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if d.get(x, z) > &(d.get(x, y) + d.get(y, z)) {
                    tri = Outcome::Fail(format!("d({x},{z}) > d({x},{y}) + d({y},{z})"), None);
                    break 'outer;
                }
            }
        }
    }
    out.push((METRIC_TRIANGLE, tri));
}

/// Glues each new block at a random vertex of the graph so far.
fn random_graph(
    rng: &mut ChaCha8Rng,
    bounds: &FuzzBounds,
    mut make: impl FnMut(&mut ChaCha8Rng, usize, &[usize]) -> WeightedBlock<Rational>,
) -> CactoidGraph<Rational> {
    let b = rng.gen_range(1..=bounds.max_blocks);
    let mut parts: Vec<GluedBlock<Rational>> = Vec::with_capacity(b);
    let mut globals: Vec<String> = Vec::new();
    for t in 0..b {
        let (n, m) = random_shape(
            rng,
            bounds.graph_max_n,
            bounds.graph_max_r,
            bounds.graph_max_m,
        );
        let block = make(rng, n, &m);
        let names = block.local_names();
        let id = format!("B{}", t + 1);
        let mut part = GluedBlock::new(id.clone(), block);
        if t > 0 {
            let at = globals[rng.gen_range(0..globals.len())].clone();
            let local = names[rng.gen_range(0..names.len())].clone();
            part = part.label(local.clone(), at);
        }
        for name in &names {
            let global = part
                .labels
                .get(name)
                .cloned()
                .unwrap_or_else(|| format!("{id}.{name}"));
            if !globals.contains(&global) {
                globals.push(global);
            }
        }
        parts.push(part);
    }
    assemble_graph(parts).expect("a tree of blocks glued at single vertices")
}

fn check_graph(graph: &CactoidGraph<Rational>, out: &mut Vec<(&'static str, Outcome)>) {
    let d = graph_distance_matrix(graph);
    out.push((
        GRAPH_RESTRICTION,
        all_pass(
            graph
                .blocks()
                .iter()
                .zip(graph.embeddings())
                .map(|(b, emb)| {
                    eq_matrix(
                        &block_distance_matrix(b),
                        &d.principal_submatrix(emb),
                        "restriction",
                    )
                }),
        ),
    ));
    let cof = graph_cof(graph);
    let cof_oracle = cofactor_sum(&d).expect("square");
    out.push((GRAPH_COF, eq_scalar(&cof_oracle, &cof, "graph cof")));
    let det_oracle = det(&d).expect("square");
    out.push((
        GRAPH_DET,
        eq_scalar(&det_oracle, &graph_det(graph), "graph det"),
    ));

    let Ok(lambda) = graph_lambda(graph) else {
        for name in [
            GRAPH_LAMBDA,
            GRAPH_LEFT,
            GRAPH_RIGHT,
            GRAPH_INVERSE,
            GRAPH_SINGULAR,
        ] {
            out.push((name, Outcome::Skip));
        }
        return;
    };
    let bag = match graph_bag(graph) {
        Ok(bag) => bag,
        Err(e) => {
            out.push((
                GRAPH_LAMBDA,
                Outcome::Fail(format!("composition failed: {e}"), None),
            ));
            return;
        }
    };
    out.push((
        GRAPH_LAMBDA,
        all_pass([
            eq_scalar(&lambda, &bag.lambda, "composed lambda"),
            eq_scalar(&det_oracle, &(lambda.clone() * cof), "lambda * cof"),
        ]),
    ));
    out.push((GRAPH_LEFT, lapexp_outcome(&verify_left_lapexp(&bag))));
    out.push((GRAPH_RIGHT, lapexp_outcome(&verify_right_lapexp(&bag))));
    if lambda.is_zero() {
        out.push((GRAPH_INVERSE, Outcome::Skip));
        out.push((
            GRAPH_SINGULAR,
            eq_scalar(&Rational::zero(), &det_oracle, "det with lambda = 0"),
        ));
        return;
    }
    out.push((GRAPH_SINGULAR, Outcome::Skip));
    let inv = bag.inverse().expect("lambda is nonzero");
    out.push((
        GRAPH_INVERSE,
        all_pass([
            eq_matrix(&Matrix::identity(d.rows()), &(&inv * &d), "inverse * D"),
            eq_matrix(&Matrix::identity(d.rows()), &(&d * &inv), "D * inverse"),
        ]),
    ));
}

fn check_positive_graph(graph: &CactoidGraph<Rational>, out: &mut Vec<(&'static str, Outcome)>) {
    let outcome = match shortest_path_oracle(graph) {
        Ok(fw) => eq_matrix(
            &fw,
            &graph_distance_matrix(graph),
            "graph distances vs shortest paths",
        ),
        Err(e) => Outcome::Fail(e.to_string(), None),
    };
    out.push((GRAPH_METRIC, outcome));
}

/// Runs every check on case `case` of the sweep.
pub fn run_case(seed: u64, case: usize, bounds: &FuzzBounds) -> CaseOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    let mut out = CaseOutcome {
        case,
        ..CaseOutcome::default()
    };

    let (n, m) = random_shape(&mut rng, bounds.max_n, bounds.max_r, bounds.max_m);
    let block = random_block(&mut rng, bounds, n, &m);
    out.blocks += 1;
    if block.zero_cycle().is_some() {
        out.degenerate_blocks += 1;
    }
    check_block(&block, &mut out.checks);

    let positive = build(n, &m, || positive_weight(&mut rng));
    out.positive_blocks += 1;
    check_metric(&positive, &mut out.checks);

    let graph = random_graph(&mut rng, bounds, |rng, n, m| {
        random_block(rng, bounds, n, m)
    });
    out.graphs += 1;
    check_graph(&graph, &mut out.checks);

    let positive = random_graph(&mut rng, bounds, |rng, n, m| {
        build(n, m, || positive_weight(rng))
    });
    check_positive_graph(&positive, &mut out.checks);
    out
}

/// Checks one given graph: every block on its own, then the composition.
/// Metric checks run only when every weight is positive.
pub fn verify_graph(graph: &CactoidGraph<Rational>) -> VerificationReport {
    let mut out = CaseOutcome::default();
    let positive = graph.all_weights_positive();
    for block in graph.blocks() {
        out.blocks += 1;
        if block.zero_cycle().is_some() {
            out.degenerate_blocks += 1;
        }
        check_block(block, &mut out.checks);
        if positive {
            out.positive_blocks += 1;
            check_metric(block, &mut out.checks);
        }
    }
    out.graphs += 1;
    check_graph(graph, &mut out.checks);
    if positive {
        check_positive_graph(graph, &mut out.checks);
    }
    VerificationReport::from_outcomes(1, &[out])
}

/// Deterministic sweep; the report does not depend on `jobs`.
pub fn fuzz(config: &FuzzConfig) -> VerificationReport {
    let run = || -> Vec<CaseOutcome> {
        (0..config.cases)
            .into_par_iter()
            .map(|i| run_case(config.seed, i, &config.bounds))
            .collect()
    };
    let outcomes = if config.jobs <= 1 {
        (0..config.cases)
            .map(|i| run_case(config.seed, i, &config.bounds))
            .collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map(|pool| pool.install(run))
            .unwrap_or_else(|_| run())
    };
    VerificationReport::from_outcomes(config.cases, &outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(cases: usize, jobs: usize) -> FuzzConfig {
        FuzzConfig {
            seed: 7,
            cases,
            bounds: FuzzBounds {
                max_n: 3,
                max_r: 3,
                max_m: 3,
                max_blocks: 3,
                graph_max_n: 2,
                graph_max_r: 2,
                graph_max_m: 2,
                ..FuzzBounds::default()
            },
            jobs,
        }
    }

    #[test]
    fn small_sweep_passes() {
        let report = fuzz(&small(20, 1));
        for r in &report.records {
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
        assert!(report.passed());
        assert_eq!(report.summary.blocks, 20);
        assert_eq!(report.summary.graphs, 20);
    }

    #[test]
    fn jobs_do_not_change_the_report() {
        assert_eq!(fuzz(&small(12, 1)), fuzz(&small(12, 3)));
    }

    #[test]
    fn degenerate_cases_pass() {
        let mut config = small(40, 1);
        config.bounds.include_degenerate = true;
        let report = fuzz(&config);
        for r in &report.records {
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
        assert!(report.summary.degenerate_blocks > 0);
        assert!(report.record(BLOCK_ZERO_CYCLE).unwrap().checked > 0);
    }

    #[test]
    fn bounds_validation() {
        assert!(FuzzBounds::default().validate().is_ok());
        let bad = FuzzBounds {
            denominators: (0, 3),
            ..FuzzBounds::default()
        };
        assert!(bad.validate().is_err());
        let bad = FuzzBounds {
            max_r: 0,
            ..FuzzBounds::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn failures_are_recorded_once_with_the_first_case() {
        let outcomes = vec![
            CaseOutcome {
                case: 0,
                checks: vec![("x", Outcome::Pass)],
                ..CaseOutcome::default()
            },
            CaseOutcome {
                case: 1,
                checks: vec![
                    ("x", Outcome::Fail("bad".into(), None)),
                    ("y", Outcome::Skip),
                ],
                ..CaseOutcome::default()
            },
            CaseOutcome {
                case: 2,
                checks: vec![("x", Outcome::Fail("worse".into(), None))],
                ..CaseOutcome::default()
            },
        ];
        let report = VerificationReport::from_outcomes(3, &outcomes);
        let x = report.record("x").unwrap();
        assert_eq!((x.checked, x.failed), (3, 2));
        assert_eq!(x.first_failure.as_ref().unwrap().case, 1);
        assert_eq!(report.record("y").unwrap().skipped, 1);
        assert_eq!(report.summary.failed_identities, 1);
        assert!(!report.passed());
    }
}
