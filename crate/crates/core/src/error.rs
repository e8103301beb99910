use thiserror::Error;

use crate::graph::EdgeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),

    #[error("invalid vertex partition: {0}")]
    InvalidPartition(String),

    #[error("invalid Z3-boundary: {0}")]
    InvalidBoundary(String),

    #[error("{what} cap exceeded: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A proven bound failed on a certified-critical graph. Always a bug.
    #[error("proven bound violated: {bound}\n{diagnostic}")]
    ProvenBoundViolated { bound: String, diagnostic: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn cap(what: &'static str, limit: usize, actual: usize) -> Self {
        Error::CapExceeded {
            what,
            limit,
            actual,
        }
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

/// Fails with [`Error::CapExceeded`] when `actual > limit`.
pub(crate) fn ensure_cap(what: &'static str, limit: usize, actual: usize) -> Result<()> {
    if actual > limit {
        Err(Error::cap(what, limit, actual))
    } else {
        Ok(())
    }
}
