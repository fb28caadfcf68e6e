use thiserror::Error;

/// Errors produced by the lattice sampling library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("generator matrix is singular (|det| = {abs_det:e}, Hadamard ratio {ratio:e})")]
    SingularMatrix { abs_det: f64, ratio: f64 },

    #[error("argument {value} outside the supported domain: {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("{0}")]
    VacuousBound(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
