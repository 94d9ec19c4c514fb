//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the library. The CLI maps [`Error::Usage`], [`Error::Domain`]
/// and [`Error::Parse`] to the usage exit status and everything else to failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input (empty sequences, points outside the support, bad flags).
    #[error("usage error: {0}")]
    Usage(String),
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Text that could not be parsed as a polynomial or corpus.
    #[error("parse error: {0}")]
    Parse(String),
    /// Failed exact-algebra operation (non-exact division, zero denominator).
    #[error("algebra error: {0}")]
    Algebra(String),
    /// The process reached an absorbing state that stops the dynamics.
    #[error("process halted: {0}")]
    Halted(String),
    /// A configured resource budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// Filesystem or serialization failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
