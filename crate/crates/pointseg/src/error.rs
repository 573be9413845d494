//! Error type shared across the network code.

use thiserror::Error;

/// Anything that can go wrong while building, running or storing the network.
#[derive(Debug, Error)]
pub enum PointsegError {
    /// Architecture description is internally inconsistent.
    #[error("invalid network config: {0}")]
    InvalidConfig(String),

    /// Input arrays do not match each other or the configured dimensions.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Sampling was asked for more centers than there are points.
    #[error("cannot sample {requested} centers from {available} points")]
    TooFewPoints { requested: usize, available: usize },

    /// A layer produced NaN or infinity; named so logs point at the culprit.
    #[error("non-finite values after layer {layer}")]
    NonFinite { layer: String },

    /// Class proportions do not describe a distribution.
    #[error("invalid class proportions: {0}")]
    InvalidProportions(String),

    /// A checkpoint file is malformed or does not match its manifest.
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),

    /// Underlying I/O failure while reading or writing a checkpoint.
    #[error("checkpoint i/o failed")]
    Io(#[from] std::io::Error),

    /// Manifest (de)serialization failure.
    #[error("checkpoint manifest is not valid JSON")]
    Json(#[from] serde_json::Error),
}
