use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded: {what} needs {required}, limit is {limit}")]
    CapacityExceeded {
        what: String,
        required: String,
        limit: String,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),

    /// A postcondition that the mathematics guarantees did not hold.
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn capacity(
        what: impl Into<String>,
        required: impl ToString,
        limit: impl ToString,
    ) -> Self {
        Error::CapacityExceeded {
            what: what.into(),
            required: required.to_string(),
            limit: limit.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
