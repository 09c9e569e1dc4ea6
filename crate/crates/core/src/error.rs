use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input value (non-normalized vector, empty box, bad width).
    #[error("validation error: {0}")]
    Validation(String),

    /// Parameter outside the domain where the operation is defined.
    #[error("domain error: {what} = {value} outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A hidden-variable model produced a response with magnitude above 1.
    #[error("model contract violated: |{which}({angle})| = {value} > 1")]
    ModelContract {
        which: &'static str,
        angle: f64,
        value: f64,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    /// Quadrature or solver did not reach its tolerance.
    #[error("numerical error: {message} (estimate {estimate:e}, tolerance {tolerance:e})")]
    Numerical {
        message: String,
        estimate: f64,
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
