use std::path::PathBuf;

use thiserror::Error;

/// Rejections raised while building or reading a graph.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node id {id} out of range for a graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge {{{u}, {v}}} has nonpositive or non-finite weight {w}")]
    BadWeight { u: usize, v: usize, w: f64 },
    #[error("vector of length {got} does not match graph order {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Failures of the maximum-entropy solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaxEntError {
    #[error("moment vector is not admissible on [{a}, {b}]")]
    NotAdmissible { a: f64, b: f64 },
    #[error("Newton iteration did not converge after {iterations} steps (gradient norm {grad_norm:e})")]
    NotConverged { iterations: usize, grad_norm: f64 },
    #[error("fitted density is not resolved by the quadrature (mass {mass} on a finer rule)")]
    Unresolved { mass: f64 },
    #[error("non-finite natural parameter")]
    NonFinite,
    #[error("need at least {needed} quadrature nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },
    #[error("invalid interval [{c}, {d}] for support [{a}, {b}]")]
    BadInterval { c: f64, d: f64, a: f64, b: f64 },
    #[error("support [{a}, {b}] is empty or non-finite")]
    BadSupport { a: f64, b: f64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    MaxEnt(#[from] MaxEntError),
    #[error("killing rate q must be positive and finite, got {0}")]
    BadRate(f64),
    #[error("root maps disagree on node count: {expected} vs {got}")]
    NodeCountMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("graph with {n} nodes exceeds the dense limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("negative eigenvalue {0}")]
    NegativeEigenvalue(f64),
    #[error("empty estimate")]
    EmptyEstimate,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
