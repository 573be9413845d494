//! Point-wise evaluation of segmentation models on radar clouds.
//!
//! Builds confusion matrices in the per-setup evaluation space, keeps a
//! parallel truth-side breakdown at full label resolution, derives
//! precision/recall/F1 (in percent, zero denominators scoring 0), a
//! background-excluded macro F1, and the ghost-truth share of real-object
//! false positives.  Reports serialize to a tab-delimited text format that
//! parses back losslessly and to aligned tables for reading.

mod error;
mod metrics;
mod report;

pub use error::EvalError;
pub use metrics::{
    confusion_matrix, f1, format_percent, ghost_fp_fraction, harmonic_mean,
    macro_average, precision, recall,
};
pub use report::{
    emit_report, fine_row, parse_report, render_tables, EvalAccumulator, EvalReport,
};
