use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inconsistent or invalid parameters (bad modulus, order mismatch, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An argument outside the domain of an operation (inverse of zero, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A size limit was exceeded.
    #[error("capacity error: {what} is {size}, limit is {limit}")]
    Capacity { what: String, size: u128, limit: u128 },

    /// A textual specification could not be parsed.
    #[error("cannot parse {token:?}: {reason}")]
    Parse { token: String, reason: String },

    /// A floating-point route lost too much precision to round to exact integers.
    #[error("precision loss: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, size: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::Capacity {
            what: what.into(),
            size: size.into(),
            limit: limit.into(),
        }
    }

    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}
