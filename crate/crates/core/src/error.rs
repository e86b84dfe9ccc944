use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate lattice: {0}")]
    Degenerate(String),
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("lattice is not even")]
    NotEven,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search budget exhausted: {0}")]
    Exhausted(String),
    #[error("tie in segment ordering; re-perturb the target point")]
    Tie,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
