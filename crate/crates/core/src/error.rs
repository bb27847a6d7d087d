use thiserror::Error;

/// Failure modes shared by every operation in the crate.
///
/// Axiom violations are not errors: validators return reports. Errors are
/// reserved for malformed input, misuse of an operation, exhausted budgets
/// and broken internal invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    #[error("undefined conditional probability: {0}")]
    Undefined(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

pub(crate) fn format_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}
