use thiserror::Error;

/// Errors raised across the crate.
///
/// Validation problems name the offending field so front ends can report it
/// verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("enumeration budget exceeded: {what} needs {needed} candidates, limit is {limit}")]
    Budget {
        what: String,
        needed: f64,
        limit: u64,
    },

    #[error("field context mismatch: {0}")]
    ContextMismatch(String),

    #[error("unsupported variety kind: {0}")]
    UnsupportedKind(String),

    #[error("series error: {0}")]
    Series(String),

    #[error("divergent evaluation: {0}")]
    Divergent(String),

    #[error("internal disagreement between independent computations: {0}")]
    InternalDisagreement(String),

    #[error("singular metric: {0}")]
    SingularMetric(String),

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("undefined divergence: {0}")]
    UndefinedDivergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
