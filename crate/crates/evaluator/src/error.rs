//! Error type for evaluation and report handling.

use thiserror::Error;

/// Failures while accumulating counts or reading a report file.
#[derive(Debug, Error)]
pub enum EvalError {
    /// Prediction and truth streams must describe the same points.
    #[error("truth stream has {truth} entries but predictions have {predictions}")]
    LengthMismatch { truth: usize, predictions: usize },

    /// The duplicate mask must cover every point.
    #[error("duplicate mask has {mask} entries for {points} points")]
    MaskMismatch { mask: usize, points: usize },

    /// A class index fell outside the evaluated label set.
    #[error("class index {index} out of range for {classes} classes")]
    UnknownClass { index: usize, classes: usize },

    /// Macro averages need at least one included label.
    #[error("macro average over an empty label set")]
    EmptyInclusionSet,

    /// Real-object and ghost label sets must be disjoint.
    #[error("real-object and ghost class sets overlap")]
    OverlappingClassSets,

    /// A report file is malformed or inconsistent with its own counts.
    #[error("malformed report: {0}")]
    Parse(String),
}
