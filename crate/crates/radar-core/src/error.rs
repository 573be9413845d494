use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid sensor spec: {0}")]
    InvalidSpec(String),

    #[error("unknown label name `{0}`")]
    UnknownLabel(String),

    #[error("point file parse error at record {record}: {message}")]
    Parse { record: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
