//! Error types, one enum per subsystem.

use std::path::PathBuf;

use thiserror::Error;

use crate::game::Role;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("negative weight {weight} for {what}")]
    NegativeWeight { what: String, weight: f64 },
    #[error("anchor weight of node {node} is zero; every node needs a positive anchor")]
    ZeroAnchor { node: usize },
    #[error("non-finite value for {what}")]
    NonFinite { what: String },
    #[error("self-loop on node {node}; self-influence belongs in the anchor weight")]
    SelfLoop { node: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("(I - P_UU) is singular; the walk cannot reach absorption from every node")]
    SingularSystem,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: u64, last_step: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("role mismatch: expected a {expected} strategy, got {got}")]
    RoleMismatch { expected: Role, got: Role },
    #[error("node index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("enumeration guard: C({n},{k}) = {subsets} k-subsets exceeds the brute-force budget")]
    TooLarge { n: usize, k: usize, subsets: u128 },
}

/// Harness-level error; wraps everything the run pipeline can hit.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report error: {0}")]
    Report(String),
}

impl RunError {
    /// CLI exit code: 3 for enumeration-guard errors, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Oracle(OracleError::TooLarge { .. }) => 3,
            _ => 2,
        }
    }
}
