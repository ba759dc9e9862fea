//! Error type shared by every module.
//!
//! The split between `Domain` and `Budget` matters to the CLI: domain errors
//! exit with code 1, budget refusals with code 2.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: out-of-range vertices, malformed structures,
    /// preconditions not met.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is well-formed but exceeds a configured cap; the message
    /// names the cap and how to raise it.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Malformed input file or serialization problem.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
