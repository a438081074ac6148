use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin {0}: 2s must be a positive integer")]
    InvalidSpin(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace {actual} does not match expected mass {expected}")]
    TraceMismatch { expected: f64, actual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("projector is not idempotent (max deviation {0:e})")]
    NotIdempotent(f64),

    #[error("negative probability {value:e} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probability table mass {actual} does not match declared {expected}")]
    MassMismatch { expected: f64, actual: f64 },

    #[error("expected a table of arity {expected}, got {actual}")]
    WrongArity { expected: usize, actual: usize },

    #[error("invalid angles: {0}")]
    InvalidAngles(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("inconsistent single-time marginals (deviation {0:e})")]
    InconsistentMarginals(f64),

    #[error("transition matrix is not stochastic: {0}")]
    NotStochastic(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
