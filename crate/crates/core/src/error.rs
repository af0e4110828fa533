use thiserror::Error;

/// Errors raised by constructors and queries in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("value outside the domain: {0}")]
    Domain(String),

    #[error("relation precondition violated: {0}")]
    Relation(String),

    #[error("unknown vertex: {0}")]
    UnknownVertex(String),

    #[error("invalid metric space: {0}")]
    InvalidMetric(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
