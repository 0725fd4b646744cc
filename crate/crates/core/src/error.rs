use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// The CLI maps [`Error::Capacity`] to exit code 2 and everything else to 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A size cap (sieve limit, brute-force cap, memory cap, term cap) was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Parameters cannot satisfy the required invariants.
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// The operation does not support this kind of input.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// A numerical routine failed to reach its tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
