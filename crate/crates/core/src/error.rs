use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot parse polynomial {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("invalid code spec: {0}")]
    InvalidSpec(String),
    #[error("l = {l} and m = {m} are not coprime")]
    NotCoprime { l: usize, m: usize },
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("integrity check failed: {0}")]
    Integrity(String),
    #[error("no logical operators exist (k = 0)")]
    NoLogicals,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed matrix file: {0}")]
    MatrixFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
