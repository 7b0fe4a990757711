use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance too large: {pairs} pairs exceeds the limit of {limit}")]
    GuardExceeded { pairs: u128, limit: u128 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by bad caller input rather than a bug.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
