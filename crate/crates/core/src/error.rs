use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mismatched radicands: sqrt({0}) vs sqrt({1})")]
    MismatchedRadicand(u32, u32),

    #[error("division by zero")]
    DivisionByZero,

    #[error("radicand {0} must be a square-free integer >= 2")]
    InvalidRadicand(u64),

    #[error("cannot parse field element {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("point ({u}, {v}) does not lie in the face")]
    NotInFace { u: String, v: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unresolved intervals without slope information: {0}")]
    Unresolved(String),

    #[error("ratio is rational; the continued fraction expansion is finite")]
    RationalRatio,

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
}
