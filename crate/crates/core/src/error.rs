use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid mode for domain: {0}")]
    InvalidMode(String),

    #[error("grid incompatible with catalog: {0}")]
    IncompatibleGrid(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no coercive direction detected: all {0} starts diverged")]
    NoCoerciveDirection(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
