use thiserror::Error;

pub type Result<T, E = ExpError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] edgeflip::Error),
    #[error("data error: {0}")]
    Data(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl ExpError {
    /// 2 for configuration problems, 3 for everything that went wrong while
    /// producing or writing data.
    pub fn exit_code(&self) -> u8 {
        match self {
            ExpError::Config(_) => 2,
            _ => 3,
        }
    }
}
