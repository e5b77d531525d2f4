use std::path::PathBuf;

use thiserror::Error;

use crate::domain::Domain;

pub type Result<T, E = MzError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MzError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {index} {point:?} lies outside {domain}")]
    DomainViolation {
        index: usize,
        point: Vec<f64>,
        domain: Domain,
    },

    #[error("sphere point {index} has norm {norm}, expected 1")]
    NotNormalized { index: usize, norm: f64 },

    #[error("domain mismatch: {expected} vs {found}")]
    DomainMismatch { expected: Domain, found: Domain },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("Jacobi eigensolver did not converge: off-diagonal mass {off_diagonal:e} after {sweeps} sweeps")]
    NoConvergence { off_diagonal: f64, sweeps: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e}); no MZ property at this degree")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("singular linear system (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("function value at node {index} is not finite")]
    NonFiniteValue { index: usize },

    #[error("reference norm of the function vanishes")]
    DegenerateFunction,

    #[error("rule construction failed: {0}")]
    Construction(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dataset missing: {0}")]
    DatasetMissing(PathBuf),
}

/// Errors raised while reading a rule text file. Line numbers are 1-based.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },

    #[error("line {line}: malformed row: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("line {line}: nonpositive weight {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("line {line}: node outside {domain}")]
    OutsideDomain { line: usize, domain: String },

    #[error("line {line}: header declares count={declared} but file holds {found} rows")]
    CountMismatch {
        line: usize,
        declared: usize,
        found: usize,
    },
}
