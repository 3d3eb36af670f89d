use thiserror::Error;

/// Failures raised by the numerical routines in this crate.
///
/// Absolute-continuity failures inside divergences and variational bounds
/// are not errors; they surface as `f64::INFINITY` / `f64::NEG_INFINITY`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconsistent result: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
