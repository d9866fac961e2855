use thiserror::Error;

#[derive(Debug, Error)]
pub enum BanditError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("horizon of {horizon} rounds exhausted")]
    BudgetExhausted { horizon: u64 },
    #[error("insufficient data: need at least {needed} samples, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, BanditError>;

pub(crate) fn invalid_arg(msg: impl Into<String>) -> BanditError {
    BanditError::InvalidArgument(msg.into())
}
