use thiserror::Error;

use crate::inverse::ValidationReport;

#[derive(Debug, Error)]
pub enum EitError {
    #[error("exponent sequence is degenerate: {0}")]
    DegenerateSequence(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("field kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("inconsistent measurement data:\n{0}")]
    InconsistentData(Box<ValidationReport>),

    #[error("point {0} is an endpoint image where the conformal map is singular")]
    SingularPoint(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for EitError {
    fn from(e: serde_json::Error) -> Self {
        EitError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, EitError>;
