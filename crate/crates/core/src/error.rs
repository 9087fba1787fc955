use thiserror::Error;

/// Errors surfaced by state construction, measurement algebra, and the search drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a probability vector (sum {0})")]
    InvalidDistribution(f64),

    #[error("unsupported dimension {0} for this construction")]
    UnsupportedDimension(usize),

    #[error("wrong parameter count: expected {expected}, got {got}")]
    BadParameterCount { expected: usize, got: usize },

    #[error("local dimension {0} exceeds the configured search budget")]
    DimensionBudget(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
