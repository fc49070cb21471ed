use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected} samples, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("unsupported transform length {0}: fast path requires a power of two")]
    UnsupportedLength(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("sequence is empty")]
    Empty,

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("outside the domain of the model: {0}")]
    Domain(String),

    #[error("Newton iteration did not converge for L = {filter_len} after {iterations} steps")]
    NoConvergence { filter_len: usize, iterations: usize },

    #[error("probe horizon {horizon} is too short; at least {required} samples are needed")]
    Truncation { horizon: usize, required: usize },

    #[error("undefined quantity: {0}")]
    Undefined(&'static str),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
