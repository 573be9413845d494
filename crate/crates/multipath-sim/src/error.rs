use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("frame time {t} ms outside recording duration {duration} ms")]
    FrameOutOfRange { t: f64, duration: f64 },

    #[error("radial velocity requested for an invalid {0} path")]
    InvalidPath(&'static str),

    #[error("amplitude model needs range > 0, got {0}")]
    NonPositiveRange(f64),

    #[error("dataset needs at least 2 recordings, got {0}")]
    TooFewRecordings(usize),

    #[error("recording split leaves the {0} partition empty")]
    EmptySplit(&'static str),

    #[error(transparent)]
    Core(#[from] radar_core::CoreError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("metadata serialization: {0}")]
    Json(#[from] serde_json::Error),
}
