//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cactoid::io::load_spec;
use cactoid::undirected::stated_t_r_value;
use cactoid::verify::{
    Status, BLOCK_COF, BLOCK_DET, BLOCK_INVERSE, BLOCK_LEFT, BLOCK_RIGHT, BRANCH_PAIR_DIST,
    CYCLE_PAIR_SPLIT, GRAPH_COF, GRAPH_DET, GRAPH_INVERSE, GRAPH_LAMBDA, GRAPH_LEFT, GRAPH_METRIC,
    GRAPH_RIGHT, METRIC_TABLE, ROTATION_ACW, ROTATION_CW,
};
use cactoid::{
    block_det, classify_with_oracle, det, fuzz, graph_distance_matrix, odd_cycle_distance_matrix,
    odd_cycle_inverse, parse_rational, sweep, FuzzConfig, Matrix, Rational, Rule, UndirectedShape,
    VerificationReport,
};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn within(limit: Duration, elapsed: Duration, ok: Outcome) -> Outcome {
    if !ok.ok {
        return ok;
    }
    if elapsed > limit {
        return fail(format!("{} but took {elapsed:.2?} > {limit:?}", ok.detail));
    }
    pass(format!("{} in {elapsed:.2?}", ok.detail))
}

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

/// Every named record checked at least `min` times with no failure.
fn records_pass(report: &VerificationReport, names: &[&str], min: usize) -> Outcome {
    let mut parts = Vec::new();
    for name in names {
        let Some(r) = report.record(name) else {
            return fail(format!("no record for {name:?}"));
        };
        if r.status != Status::Pass {
            return fail(format!("{name}: {:?}", r.first_failure));
        }
        if r.checked < min {
            return fail(format!("{name}: only {} checks, need {min}", r.checked));
        }
        parts.push(format!("{} x{}", name, r.checked));
    }
    pass(parts.join("; "))
}

fn figure() -> Outcome {
    let expected = Matrix::<Rational>::from_ints(&[
        [0, 2, 3, 2, 1, 5, 6],
        [-2, 0, 1, 0, -1, 3, 4],
        [-3, -1, 0, -1, -2, 2, 3],
        [-2, 0, 1, 0, -1, 3, 4],
        [-1, 1, 2, 1, 0, 4, 5],
        [2, 4, 5, 4, 3, 0, 1],
        [1, 3, 4, 3, 2, 6, 0],
    ])
    .unwrap();
    let graph = match load_spec(&fixture("dc_2_2_2.json"))
        .and_then(|s| s.into_graph_spec().and_then(|g| g.to_graph()))
    {
        Ok(g) => g,
        Err(e) => return fail(format!("fixture: {e}")),
    };
    let d = graph_distance_matrix(&graph);
    if let Some((i, j)) = d.first_mismatch(&expected) {
        return fail(format!("entry ({i}, {j}) is {}", d.get(i, j)));
    }
    let closed = block_det(&graph.blocks()[0]);
    let oracle = det(&d).unwrap();
    if closed != q("0") || oracle != q("0") {
        return fail(format!("det closed {closed}, oracle {oracle}"));
    }
    pass("7x7 matrix exact, det 0 (closed form and oracle)")
}

fn block_count(report: &VerificationReport, min: usize) -> Option<Outcome> {
    (report.summary.blocks < min)
        .then(|| fail(format!("only {} blocks, need {min}", report.summary.blocks)))
}

fn undirected(results: &[cactoid::Comparison]) -> Outcome {
    let mut checked = 0;
    for c in results {
        let v = &c.verdict;
        let covered = match v.rule {
            Rule::PathOne => v.verdict.kind() == "zero",
            Rule::OddPath => c.shape.n() >= 3,
            _ => true,
        };
        if !covered || v.verdict.kind() == "unknown" {
            continue;
        }
        checked += 1;
        if c.agrees != Some(true) {
            return fail(format!(
                "{} ({}): verdict {:?}, oracle {}",
                c.shape, v.rule, v.verdict, c.oracle
            ));
        }
    }
    let spot = [(3, vec![1, 1], "4"), (2, vec![1, 1], "-16")];
    for (n, m, want) in spot {
        let s = UndirectedShape::new(n, m).unwrap();
        let c = classify_with_oracle(&s, 14).unwrap();
        if c.verdict.verdict.value() != Some(q(want)) || c.oracle != q(want) {
            return fail(format!(
                "{s}: {:?} vs oracle {}",
                c.verdict.verdict, c.oracle
            ));
        }
    }
    for k in 1..=6usize {
        // C_{2k+1} is C(1; 2k-1)
        let s = UndirectedShape::new(1, vec![2 * k - 1]).unwrap();
        let c = classify_with_oracle(&s, 14).unwrap();
        let want = Rational::from_integer((k * (k + 1)).into());
        if c.verdict.verdict.value() != Some(want.clone()) || c.oracle != want {
            return fail(format!(
                "{s}: {:?} vs oracle {}",
                c.verdict.verdict, c.oracle
            ));
        }
    }
    let unknown = results
        .iter()
        .filter(|c| c.verdict.verdict.kind() == "unknown")
        .count();
    pass(format!(
        "{} shapes, {checked} covered verdicts agree, {unknown} without a closed form",
        results.len()
    ))
}

fn odd_cycles() -> Outcome {
    for k in 1..=6 {
        let d = odd_cycle_distance_matrix::<Rational>(k);
        let inv = odd_cycle_inverse::<Rational>(k);
        if !(&inv * &d).is_identity() || !(&d * &inv).is_identity() {
            return fail(format!("k = {k}"));
        }
    }
    pass("k = 1..6 exact")
}

fn t_r(results: &[cactoid::Comparison]) -> Outcome {
    let mut lines = Vec::new();
    for r in 2..=5 {
        let shape = UndirectedShape::new(1, vec![1; r]).unwrap();
        let Some(c) = results.iter().find(|c| c.shape == shape) else {
            return fail(format!("{shape} missing from the sweep"));
        };
        let stated = stated_t_r_value(r);
        if c.verdict.verdict.value() != Some(stated.clone()) {
            return fail(format!(
                "{shape}: classifier does not carry the stated value"
            ));
        }
        let differs = c.oracle != stated;
        if differs != c.is_discrepancy() {
            return fail(format!("{shape}: discrepancy flag wrong"));
        }
        if differs {
            lines.push(format!("T_{r}: stated {stated}, oracle {}", c.oracle));
        }
    }
    if lines.is_empty() {
        return pass("stated constant agrees with the oracle for r = 2..5");
    }
    pass(format!("discrepancies recorded: {}", lines.join("; ")))
}

fn main() -> ExitCode {
    let mut outcomes: Vec<(usize, &str, Outcome)> = Vec::new();

    let t = Instant::now();
    let o = figure();
    outcomes.push((
        1,
        "figure fixture",
        within(Duration::from_secs(1), t.elapsed(), o),
    ));

    let t = Instant::now();
    let report = fuzz(&FuzzConfig {
        seed: 1,
        cases: 500,
        jobs: 4,
        ..FuzzConfig::default()
    });
    let elapsed = t.elapsed();
    eprintln!(
        "fuzz: {} blocks ({} positive), {} graphs in {elapsed:.2?}",
        report.summary.blocks, report.summary.positive_blocks, report.summary.graphs
    );
    let blocks = report.summary.blocks;

    let o = block_count(&report, 500).unwrap_or_else(|| records_pass(&report, &[BLOCK_DET], 500));
    outcomes.push((
        2,
        "block determinant",
        within(Duration::from_secs(30), elapsed, o),
    ));

    let o = block_count(&report, 500).unwrap_or_else(|| records_pass(&report, &[BLOCK_COF], 500));
    outcomes.push((3, "block cofactor sum", o));

    let o = records_pass(&report, &[BLOCK_INVERSE, BLOCK_LEFT, BLOCK_RIGHT], 1);
    outcomes.push((4, "rank-one inverse and LapExp", o));

    let o = if report.summary.graphs < 100 {
        fail(format!("only {} graphs", report.summary.graphs))
    } else {
        records_pass(
            &report,
            &[
                GRAPH_COF,
                GRAPH_DET,
                GRAPH_LAMBDA,
                GRAPH_INVERSE,
                GRAPH_LEFT,
                GRAPH_RIGHT,
            ],
            100,
        )
    };
    outcomes.push((5, "composition", o));

    let o = records_pass(&report, &[METRIC_TABLE, GRAPH_METRIC], 100);
    outcomes.push((6, "metric cross-check", o));

    let t = Instant::now();
    let results = sweep(14);
    let elapsed = t.elapsed();
    outcomes.push((
        7,
        "undirected classifier",
        within(Duration::from_secs(60), elapsed, undirected(&results)),
    ));

    outcomes.push((8, "odd-cycle inverse", odd_cycles()));
    outcomes.push((9, "T_r discrepancy surfacing", t_r(&results)));

    let o = records_pass(
        &report,
        &[
            CYCLE_PAIR_SPLIT,
            BRANCH_PAIR_DIST,
            ROTATION_CW,
            ROTATION_ACW,
        ],
        blocks,
    );
    outcomes.push((10, "pair-sum identities", o));

    let mut all = true;
    for (n, name, o) in &outcomes {
        all &= o.ok;
        println!(
            "criterion {n:>2} {:<4} {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
