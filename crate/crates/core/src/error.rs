use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: String, found: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("generator {index} is not homogeneous")]
    Inhomogeneous { index: usize },
    #[error("generator {index} has degree {degree}; generators must have degree at least 2")]
    LowDegreeGenerator { index: usize, degree: usize },
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("degree {requested} exceeds the truncation bound {bound}")]
    Truncation { requested: usize, bound: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("precondition refused: {0}")]
    Precondition(String),
    #[error("no lift exists: {0}")]
    NoLift(String),
    #[error("sign convention violated: {0}")]
    ConventionViolation(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}
