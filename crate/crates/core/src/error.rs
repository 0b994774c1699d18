//! Error type shared by every module, with a fixed mapping to process exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller violated a precondition (bad arguments, mixed groups, overlapping sets).
    #[error("usage error: {0}")]
    Usage(String),
    /// Input outside the mathematical domain of an operation (empty set, bad ε).
    #[error("domain error: {0}")]
    Domain(String),
    /// Configuration failed schema validation; `path` names the offending field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    /// A computation needed more of the window than the carrier provides.
    #[error("margin error: {0}")]
    Margin(String),
    /// A mathematical hypothesis (growth, advantage, syndeticity) does not hold.
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),
    /// Enumeration or search hit its memory or step budget.
    #[error("resource error: {0}")]
    Resource(String),
    /// Decoding met an input that no encoder could have produced.
    #[error("corrupt input at {position}: {message}")]
    Corrupt { position: String, message: String },
    /// A structural check on decoded data failed (ambiguous markers, overlaps).
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    /// A bug: an invariant that the code itself should maintain was violated.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Exit code contract: 0 ok, 2 config/usage, 3 margin, 4 hypothesis, 5 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config { .. } | Error::Parse(_) | Error::Domain(_) => 2,
            Error::Margin(_) => 3,
            Error::Hypothesis(_) => 4,
            Error::Resource(_)
            | Error::Corrupt { .. }
            | Error::Integrity(_)
            | Error::Io(_)
            | Error::Internal(_) => 5,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
