//! Command-line front end: load a spec, compute, print JSON.
//!
//! Exit codes: 0 success, 1 verification mismatch or a singular/undefined
//! inverse, 2 bad input.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use cactoid::io::{load_spec, rationals_to_strings, to_json_string, GraphSpec, MatrixJson, Spec};
use cactoid::{
    classify_det, classify_with_oracle, cofactor_sum, det, fuzz, graph_bag, graph_cof, graph_det,
    graph_distance_matrix, graph_inverse, inverse, shortest_path_oracle, sweep,
    undirected_distance_matrix, verify_graph, FuzzBounds, FuzzConfig, Rational, RationalGraph,
    UndirectedShape, VerificationReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cactoid",
    version,
    about = "Exact distance-matrix algebra for cactoid digraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SpecArg {
    /// Spec file path, or inline JSON starting with `{`.
    spec: String,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Compute by brute force instead of the closed forms.
    #[arg(long)]
    oracle: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance matrix.
    Dist(OracleArgs),
    /// Determinant of the distance matrix.
    Det(OracleArgs),
    /// Sum of all cofactors of the distance matrix.
    Cof(OracleArgs),
    /// Inverse of the distance matrix.
    Inv(OracleArgs),
    /// Lambda, alpha, beta and the Laplacian-like matrix.
    Bag(SpecArg),
    /// Check every closed form for one graph against the oracles.
    Verify(SpecArg),
    /// Determinant verdict for an undirected family member.
    Classify(ClassifyArgs),
    /// Seeded random sweep of all identities.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Spec of kind `undirected_family`; omit with `--sweep`.
    #[arg(required_unless_present = "sweep")]
    spec: Option<String>,
    /// Largest vertex count the brute-force oracle accepts.
    #[arg(long, default_value_t = 14)]
    max_vertices: usize,
    /// Classify every shape with at most this many vertices.
    #[arg(long, conflicts_with = "spec")]
    sweep: Option<usize>,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Keep blocks with a zero-weight cycle.
    #[arg(long)]
    include_degenerate: bool,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    max_r: Option<usize>,
    #[arg(long)]
    max_m: Option<usize>,
    #[arg(long)]
    max_blocks: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    num_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    num_max: Option<i64>,
    #[arg(long)]
    den_min: Option<i64>,
    #[arg(long)]
    den_max: Option<i64>,
}

impl FuzzArgs {
    fn config(&self) -> Result<FuzzConfig, String> {
        let d = FuzzBounds::default();
        let bounds = FuzzBounds {
            max_n: self.max_n.unwrap_or(d.max_n),
            max_r: self.max_r.unwrap_or(d.max_r),
            max_m: self.max_m.unwrap_or(d.max_m),
            max_blocks: self.max_blocks.unwrap_or(d.max_blocks),
            numerators: (
                self.num_min.unwrap_or(d.numerators.0),
                self.num_max.unwrap_or(d.numerators.1),
            ),
            denominators: (
                self.den_min.unwrap_or(d.denominators.0),
                self.den_max.unwrap_or(d.denominators.1),
            ),
            include_degenerate: self.include_degenerate,
            ..d
        };
        bounds.validate()?;
        if self.cases == 0 {
            return Err("--cases must be at least 1".into());
        }
        Ok(FuzzConfig {
            seed: self.seed,
            cases: self.cases,
            bounds,
            jobs: self.jobs.max(1),
        })
    }
}

/// A failed run: exit code and a message for standard error.
struct Failure(i32, String);

fn input(e: impl ToString) -> Failure {
    Failure(EXIT_INPUT, e.to_string())
}

fn failed(e: impl ToString) -> Failure {
    Failure(EXIT_FAIL, e.to_string())
}

enum Loaded {
    Graph(RationalGraph),
    Undirected(UndirectedShape),
}

fn load(arg: &str) -> Result<Loaded, Failure> {
    match load_spec(arg).map_err(input)? {
        Spec::Digraph(g) => Ok(Loaded::Graph(g.to_graph().map_err(input)?)),
        Spec::Undirected(u) => Ok(Loaded::Undirected(u.to_shape().map_err(input)?)),
    }
}

fn load_graph(arg: &str) -> Result<RationalGraph, Failure> {
    let spec = load_spec(arg).map_err(input)?;
    let g: GraphSpec = spec.into_graph_spec().map_err(input)?;
    g.to_graph().map_err(input)
}

fn load_shape(arg: &str) -> Result<UndirectedShape, Failure> {
    let spec = load_spec(arg).map_err(input)?;
    spec.into_undirected_spec()
        .map_err(input)?
        .to_shape()
        .map_err(input)
}

fn distances(loaded: &Loaded, oracle: bool) -> Result<cactoid::RationalMatrix, Failure> {
    match loaded {
        Loaded::Graph(g) if oracle => shortest_path_oracle(g).map_err(input),
        Loaded::Graph(g) => Ok(graph_distance_matrix(g)),
        Loaded::Undirected(s) => Ok(undirected_distance_matrix(s)
            .with_vertex_labels(s.labels())
            .expect("one label per vertex")),
    }
}

fn scalar(key: &str, v: &Rational) -> Value {
    json!({ key: v.to_string() })
}

#[derive(Serialize)]
struct BagJson {
    lambda: String,
    alpha: Vec<String>,
    beta: Vec<String>,
    laplacian_like: MatrixJson,
}

fn comparison_json(shape: &UndirectedShape, max_vertices: usize) -> Result<Value, Failure> {
    let verdict = classify_det(shape);
    let mut out = json!({
        "shape": shape.to_string(),
        "verdict": verdict.verdict.kind(),
        "value": verdict.verdict.value().map(|v| v.to_string()),
        "rule": verdict.rule.tag(),
        "oracle": Value::Null,
        "agrees": Value::Null,
    });
    if let Some(dep) = &verdict.dependence {
        out["dependence"] = dep
            .columns
            .iter()
            .map(|(l, c)| json!([l, c]))
            .collect::<Vec<_>>()
            .into();
    }
    if shape.vertex_count() <= max_vertices {
        let c = classify_with_oracle(shape, max_vertices).map_err(input)?;
        out["oracle"] = c.oracle.to_string().into();
        out["agrees"] = c.agrees.into();
    }
    Ok(out)
}

/// Printed either way; a failing report also sets exit code 1.
fn report_result(report: &VerificationReport) -> Result<Output, Failure> {
    let v = serde_json::to_value(report).expect("report serializes");
    let code = if report.passed() { EXIT_OK } else { EXIT_FAIL };
    Ok(Output(v, code))
}

struct Output(Value, i32);

impl From<Value> for Output {
    fn from(v: Value) -> Self {
        Output(v, EXIT_OK)
    }
}

fn execute(command: Command) -> Result<Output, Failure> {
    let value = match command {
        Command::Dist(a) => {
            let d = distances(&load(&a.spec.spec)?, a.oracle)?;
            Ok(serde_json::to_value(MatrixJson::from(&d)).expect("matrix serializes"))
        }
        Command::Det(a) => match load(&a.spec.spec)? {
            Loaded::Graph(g) if !a.oracle => Ok(scalar("det", &graph_det(&g))),
            loaded => {
                let d = distances(&loaded, a.oracle)?;
                Ok(scalar("det", &det(&d).expect("square")))
            }
        },
        Command::Cof(a) => match load(&a.spec.spec)? {
            Loaded::Graph(g) if !a.oracle => Ok(scalar("cof", &graph_cof(&g))),
            loaded => {
                let d = distances(&loaded, a.oracle)?;
                Ok(scalar("cof", &cofactor_sum(&d).expect("square")))
            }
        },
        Command::Inv(a) => {
            let inv = match load(&a.spec.spec)? {
                Loaded::Graph(g) if !a.oracle => graph_inverse(&g).map_err(failed)?,
                loaded => {
                    let d = distances(&loaded, a.oracle)?;
                    inverse(&d).map_err(failed)?
                }
            };
            Ok(serde_json::to_value(MatrixJson::from(&inv)).expect("matrix serializes"))
        }
        Command::Bag(a) => {
            let g = load_graph(&a.spec)?;
            let bag = graph_bag(&g).map_err(failed)?;
            let out = BagJson {
                lambda: bag.lambda.to_string(),
                alpha: rationals_to_strings(&bag.alpha.column_values()),
                beta: rationals_to_strings(&bag.beta.column_values()),
                laplacian_like: MatrixJson::from(&bag.laplacian_like),
            };
            Ok(serde_json::to_value(out).expect("bag serializes"))
        }
        Command::Verify(a) => return report_result(&verify_graph(&load_graph(&a.spec)?)),
        Command::Classify(a) => {
            if let Some(max) = a.sweep {
                if max > a.max_vertices {
                    return Err(input(format!(
                        "--sweep {max} exceeds --max-vertices {}",
                        a.max_vertices
                    )));
                }
                let results = sweep(max);
                let records: Vec<Value> = results
                    .iter()
                    .map(|c| comparison_json(&c.shape, max))
                    .collect::<Result<_, _>>()?;
                let discrepancies = results.iter().filter(|c| c.is_discrepancy()).count();
                return Ok(Output::from(json!({
                    "shapes": results.len(),
                    "discrepancies": discrepancies,
                    "records": records,
                })));
            }
            let spec = a
                .spec
                .as_deref()
                .expect("clap requires a spec without --sweep");
            comparison_json(&load_shape(spec)?, a.max_vertices)
        }
        Command::Fuzz(a) => return report_result(&fuzz(&a.config().map_err(input)?)),
    };
    value.map(Output::from)
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command) {
        Ok(Output(value, code)) => {
            let _ = writeln!(out, "{}", to_json_string(&value));
            if code != EXIT_OK {
                let _ = writeln!(err, "error: verification failed");
            }
            code
        }
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
