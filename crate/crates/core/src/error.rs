use thiserror::Error;

#[derive(Debug, Error)]
pub enum FoamError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("degree violation: {0}")]
    DegreeViolation(String),
    #[error("d^2 != 0: {0}")]
    NonZeroSquare(String),
    #[error("invalid slice word: {0}")]
    InvalidWord(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FoamError>;
