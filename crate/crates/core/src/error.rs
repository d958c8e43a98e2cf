use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed (ill-conditioned input, non-convergence, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A configured work cap was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Two independent evaluation routes disagree beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
