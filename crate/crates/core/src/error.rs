use thiserror::Error;

/// Errors raised by the library.
///
/// Validation problems that are reported as data (see
/// [`crate::diagram::ValidationReport`]) never show up here; these are
/// failures that stop a computation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("semigroup condition fails at {location}: {detail}")]
    SemigroupCondition { location: String, detail: String },

    #[error("resource bound exceeded: {0}")]
    Bound(String),

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    /// An internal consistency check failed. Seeing this means a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
