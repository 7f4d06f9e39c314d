use thiserror::Error;

/// Errors raised by the exact kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("singular basis")]
    SingularBasis,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("empty piece list")]
    EmptyPieces,
    #[error("norms live on different carrier polytopes")]
    CarrierMismatch,
    #[error("unsupported mode: {0}")]
    Unsupported(String),
    #[error("degree {0} is not tabulated")]
    Untabulated(u32),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
