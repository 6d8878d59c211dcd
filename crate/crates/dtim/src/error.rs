use thiserror::Error;

/// Errors produced by graph construction and the selection/simulation pipeline.
#[derive(Debug, Error)]
pub enum DtimError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no edges")]
    EmptyGraph,

    #[error("rank iteration did not converge within {max_iterations} sweeps (residual {residual:e})")]
    NoConvergence {
        max_iterations: usize,
        residual: f64,
    },

    #[error("incoming edge weights of node {node} sum to {sum}, exceeding 1")]
    Inadmissible { node: u32, sum: f64 },

    #[error("target set is empty")]
    EmptyTargetSet,

    #[error("boundary set is empty")]
    EmptyBoundary,

    #[error("boundary external in-degree sum is zero")]
    DegenerateBoundary,

    #[error("{0}")]
    InvalidInput(String),

    #[error("live-edge enumeration would visit {worlds} worlds (limit {limit})")]
    EnumerationTooLarge { worlds: u128, limit: u128 },

    #[error("seed sets have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("mean of the sequence is zero")]
    ZeroMean,

    #[error("sequence has zero variance")]
    ZeroVariance,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DtimError>;
