use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode index {index} out of range (spectrum has {len} modes)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("root iteration did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
