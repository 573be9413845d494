//! Synthetic generation of labeled radar recordings with multi-path ghost
//! detections.
//!
//! Walls, guardrails and parked cars are modeled as finite specular mirror
//! segments. A moving road user next to such a segment produces, besides
//! its direct first-bounce detections, a mirrored ghost image via a
//! surface-object-surface third bounce, and optionally the two
//! second-bounce variants used for failure-mode studies. Ghost range,
//! azimuth and Doppler all follow from the mirror image of the object, so
//! they stay mutually consistent with the direct detections.

mod amplitude;
mod dataset;
mod error;
mod geometry;
mod paths;
mod rng;
mod scenario;
mod simulate;

pub use amplitude::amplitude_model;
pub use dataset::{
    build_dataset, generate_recording, DatasetConfig, DatasetMetadata, RecordingMeta, Split,
    METADATA_FILE,
};
pub use error::SimError;
pub use geometry::{
    bearing_deg, mirror_across_line, point_to_segment_distance, segment_intersection, Vec2,
};
pub use paths::{
    direct_path, ghost_radial_velocity, second_bounce_paths, type2_third_bounce_path, PathResult,
    PathType,
};
pub use rng::{derive_seed, rng_for};
pub use scenario::{
    ClutterModel, ObjectModel, Reflector, Scenario, SecondBounceMode, SensorPose, SimOptions, Vru,
    VruCategory, VruTrajectory,
};
pub use simulate::{auto_duration_ms, scatter_object, simulate_frame, trajectory_state};
