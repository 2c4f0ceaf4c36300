//! JSON forms of matrices, graph specs and undirected shapes.
//!
//! Rationals are always canonical strings (`"-3"`, `"1/2"`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{assemble_graph, Branch, CactoidGraph, GluedBlock, GraphError, WeightedBlock};
use crate::linalg::{LinalgError, Matrix};
use crate::scalar::{parse_rational, ParseRationalError};
use crate::undirected::{UndirectedError, UndirectedShape};
use crate::Rational;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Undirected(#[from] UndirectedError),
    #[error(transparent)]
    Matrix(#[from] LinalgError),
    #[error("block {id}: n = {n} but {got} path weights")]
    PathLength { id: String, n: usize, got: usize },
    #[error("expected a {expected} spec, got {got}")]
    WrongKind {
        expected: &'static str,
        got: &'static str,
    },
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelsJson {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub labels: LabelsJson,
    pub entries: Vec<Vec<String>>,
}

impl From<&Matrix<Rational>> for MatrixJson {
    fn from(m: &Matrix<Rational>) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            labels: LabelsJson {
                rows: m.row_labels().to_vec(),
                cols: m.col_labels().to_vec(),
            },
            entries: m
                .to_rows()
                .iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for Matrix<Rational> {
    type Error = IoError;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        let rows = j
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = Matrix::from_rows(rows)?;
        if m.rows() != j.rows || (j.rows > 0 && m.cols() != j.cols) {
            return Err(LinalgError::EntryCount {
                rows: j.rows,
                cols: j.cols,
                got: m.rows() * m.cols(),
            }
            .into());
        }
        Ok(m.with_labels(j.labels.rows.clone(), j.labels.cols.clone())?)
    }
}

pub fn rationals_to_strings(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn parse_all(xs: &[String]) -> Result<Vec<Rational>> {
    Ok(xs
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleSpec {
    pub branch_weights: Vec<String>,
    pub closing_weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub n: usize,
    pub path_weights: Vec<String>,
    pub cycles: Vec<CycleSpec>,
    /// local vertex name (`u0`, `v2.1`, ..) -> global label
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub blocks: Vec<BlockSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UndirectedSpec {
    pub n: usize,
    pub m: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Spec {
    #[serde(rename = "cactoid_digraph")]
    Digraph(GraphSpec),
    #[serde(rename = "undirected_family")]
    Undirected(UndirectedSpec),
}

impl Spec {
    fn kind(&self) -> &'static str {
        match self {
            Spec::Digraph(_) => "cactoid_digraph",
            Spec::Undirected(_) => "undirected_family",
        }
    }

    pub fn into_graph_spec(self) -> Result<GraphSpec> {
        match self {
            Spec::Digraph(g) => Ok(g),
            other => Err(IoError::WrongKind {
                expected: "cactoid_digraph",
                got: other.kind(),
            }),
        }
    }

    pub fn into_undirected_spec(self) -> Result<UndirectedSpec> {
        match self {
            Spec::Undirected(u) => Ok(u),
            other => Err(IoError::WrongKind {
                expected: "undirected_family",
                got: other.kind(),
            }),
        }
    }
}

pub fn parse_spec(json: &str) -> Result<Spec> {
    Ok(serde_json::from_str(json)?)
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
pub fn load_spec(arg: &str) -> Result<Spec> {
    if arg.trim_start().starts_with('{') {
        return parse_spec(arg);
    }
    let text = std::fs::read_to_string(Path::new(arg)).map_err(|source| IoError::Read {
        path: arg.to_owned(),
        source,
    })?;
    parse_spec(&text)
}

impl BlockSpec {
    pub fn to_block(&self, index: usize) -> Result<WeightedBlock<Rational>> {
        if self.path_weights.len() != self.n {
            return Err(IoError::PathLength {
                id: self.id_or_default(index),
                n: self.n,
                got: self.path_weights.len(),
            });
        }
        let branches = self
            .cycles
            .iter()
            .map(|c| {
                Ok(Branch {
                    weights: parse_all(&c.branch_weights)?,
                    closing: parse_rational(&c.closing_weight)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightedBlock::from_weights(
            parse_all(&self.path_weights)?,
            branches,
        )?)
    }

    fn id_or_default(&self, index: usize) -> String {
        self.id.clone().unwrap_or_else(|| format!("B{}", index + 1))
    }

    /// Spec of a block, cycles in the order the block was built with.
    pub fn from_block(id: Option<String>, block: &WeightedBlock<Rational>) -> Self {
        let w = block.input_weights();
        BlockSpec {
            id,
            n: w.path.len(),
            path_weights: rationals_to_strings(&w.path),
            cycles: w
                .branches
                .iter()
                .map(|b| CycleSpec {
                    branch_weights: rationals_to_strings(&b.weights),
                    closing_weight: b.closing.to_string(),
                })
                .collect(),
            labels: BTreeMap::new(),
        }
    }
}

impl GraphSpec {
    pub fn to_graph(&self) -> Result<CactoidGraph<Rational>> {
        let parts = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut part = GluedBlock::new(b.id_or_default(i), b.to_block(i)?);
                part.labels = b.labels.clone();
                Ok(part)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(assemble_graph(parts)?)
    }

    /// Spec reproducing `graph`; only labels that differ from the automatic
    /// `"{id}.{local}"` form are written out.
    pub fn from_graph(graph: &CactoidGraph<Rational>) -> Self {
        let blocks = graph
            .blocks()
            .iter()
            .enumerate()
            .map(|(t, b)| {
                let id = graph.block_ids()[t].clone();
                let mut spec = BlockSpec::from_block(Some(id.clone()), b);
                for (local, &g) in b.local_names().iter().zip(graph.embedding(t)) {
                    let global = &graph.vertices()[g];
                    if *global != format!("{id}.{local}") {
                        spec.labels.insert(local.clone(), global.clone());
                    }
                }
                spec
            })
            .collect();
        GraphSpec { blocks }
    }
}

impl UndirectedSpec {
    pub fn to_shape(&self) -> Result<UndirectedShape> {
        Ok(UndirectedShape::new(self.n, self.m.clone())?)
    }
}

pub fn to_json_string<S: Serialize>(value: &S) -> String {
    serde_json::to_string(value).expect("plain data always serializes")
}
