use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric/Hermitian (relative asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("residual is neither positive nor negative definite")]
    Orientation,

    #[error("series not converged after degree {degree} (tail {tail:e})")]
    NotConverged { degree: usize, tail: f64 },

    #[error("only {got} samples fell in the requested orientation class (need {need})")]
    InsufficientSamples { got: usize, need: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
