use thiserror::Error;

/// Error type shared by the whole crate.
///
/// All integer arithmetic is done in checked 128-bit signed integers; any
/// overflow surfaces as [`Error::Range`] and is never silently wrapped.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A caller-visible precondition was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A value left the supported integer or enumeration range.
    #[error("range error: {0}")]
    Range(String),
    /// An internal consistency check failed. Seeing this is a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
