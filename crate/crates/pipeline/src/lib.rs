//! Turns raw radar recordings into fixed-size training samples.
//!
//! The stages, in order: accumulate detections over a short time window
//! (merging both sensors), resample every window to a fixed point count
//! by the amplitude rule, build standardized per-point features in the
//! ego frame, and remap ground-truth labels into the label set of the
//! chosen training setup. All stages are pure and deterministic.

mod error;
mod features;
mod loader;
mod resample;
mod sample;
mod setup;
mod window;

pub use error::PipelineError;
pub use features::{
    compute_feature_stats, feature_dim, make_features, raw_point_features, FeatureStats,
};
pub use loader::{build_samples, PipelineConfig, SplitSamples};
pub use resample::resample_fixed;
pub use sample::{read_sample_text, write_sample_text, Sample, SampleOrigin};
pub use setup::{remap_labels, SetupId};
pub use window::{accumulate, Window};
