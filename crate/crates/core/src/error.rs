use thiserror::Error;

/// Errors raised by the lifting library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("ill-conditioned Gram matrix: min eigenvalue {min_eigenvalue:e} after shift {shift:e}")]
    Conditioning { min_eigenvalue: f64, shift: f64 },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("lifted state diverged at step {step}: |chi| = {norm:e} exceeds {limit:e}")]
    Overflow { step: usize, norm: f64, limit: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}
