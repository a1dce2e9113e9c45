use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polar axis undefined: quaternion has no imaginary part")]
    DegenerateAxis,
    #[error("logarithm of zero")]
    ZeroArgument,
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("real matrix is not the embedding of a {field} matrix (block residual {residual:e})")]
    NotInImage { field: &'static str, residual: f64 },
    #[error("innovation covariance is singular (condition number {condition:e})")]
    SingularInnovation { condition: f64 },
    #[error("phase increment is zero")]
    ZeroPhaseIncrement,
    #[error("estimator diverged: {0}")]
    Divergence(String),
    #[error("rotation axis undefined: envelopes are parallel")]
    UndefinedAxis,
    #[error("phasor normalization invalid: Im_i(h) = {0:e} is not positive")]
    InvalidNormalization(f64),
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: time is not increasing")]
    NonMonotoneTime { line: u64 },
    #[error("sampling jitter {jitter:.3}% exceeds 1% of the median interval")]
    JitterExcess { jitter: f64 },
}
