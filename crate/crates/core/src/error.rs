use thiserror::Error;

/// Errors reported by the library. Infeasible searches are reported through
/// [`Error::NoDecompositionFound`]; everything else signals bad input or a
/// resource problem.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i128, m: u64 },

    #[error("moduli {a} and {b} are not coprime")]
    NonCoprimeModuli { a: u64, b: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no decomposition found for n = {n} (s = {s})")]
    NoDecompositionFound { n: u64, s: u32 },

    #[error("resource error: {0}")]
    Resource(String),

    #[error("malformed bitmap file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
