use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("dimensions must be positive (n = {n}, m = {m})")]
    EmptyDimension { n: usize, m: usize },

    #[error("signal entry {index} is not finite")]
    NonFinite { index: usize },

    #[error("sensing vector has non-positive squared norm {0}")]
    DegenerateRow(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
