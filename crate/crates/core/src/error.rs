use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scheme order must be 1, 2, 3 or 4, got {0}")]
    InvalidOrder(usize),

    #[error("fractional order alpha must lie in (0, 1], got {0}")]
    AlphaOutOfRange(f64),

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range for table of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("grid functions have different lengths ({left} vs {right})")]
    GridMismatch { left: usize, right: usize },

    #[error("grid function has non-zero boundary values")]
    NonZeroBoundary,

    #[error("zero pivot in tridiagonal elimination at row {index}")]
    SingularPivot { index: usize },

    #[error("time level {needed} requested but only {available} levels are stored")]
    MissingHistory { needed: usize, available: usize },

    #[error("{0} must be strictly decreasing")]
    NotDecreasing(&'static str),

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
