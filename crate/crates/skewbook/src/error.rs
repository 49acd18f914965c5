//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by model construction, geometry operations and the
/// experiment runner.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violates an operation's contract (shape mismatch,
    /// out-of-range parameter, non-Hermitian input, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A full-rank subspace has no orthogonal complement to represent.
    #[error("empty null space: {0}")]
    EmptyNullSpace(String),

    /// Channel statistics violate a model constraint (e.g. transmit and
    /// receive covariance traces disagree).
    #[error("invalid statistics: {0}")]
    InvalidStatistics(String),

    /// Statistics are degenerate for the requested operation (e.g. all
    /// relevant eigenvalues are zero).
    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),

    /// The requested codebook plan cannot be met; raise `beta` or `b`.
    #[error("infeasible codebook plan: {0}")]
    InfeasiblePlan(String),

    /// Reading or writing a config/result file failed.
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
