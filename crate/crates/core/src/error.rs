use thiserror::Error;

/// Errors raised by the library.
///
/// `Input` covers malformed or out-of-contract arguments; `Limit` covers the
/// configurable resource caps (lattice closure size, integer overflow of
/// graded dimensions). The CLI maps them to exit codes 1 and 2.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn limit(msg: impl Into<String>) -> Self {
        Error::Limit(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
