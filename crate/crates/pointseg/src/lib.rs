//! Point cloud segmentation network for radar data.
//!
//! A PointNet++-style architecture specialized for 2D radar clouds: three
//! multi-scale grouping encoder levels shrink the cloud to a handful of
//! context centers, three feature-propagation levels spread the context back
//! onto every point, and a per-point head scores the classes.  Forward,
//! loss and analytic backward are implemented from scratch on `ndarray`;
//! everything is deterministic given a seed, and checkpoints round-trip
//! bit-exactly.

mod config;
mod error;
mod forward;
mod loss;
mod params;
mod sampling;

pub use config::{MsgLevelConfig, NetworkConfig};
pub use error::PointsegError;
pub use forward::{
    forward, interpolate_features, loss_and_gradients, mini_pointnet, DropoutMode,
    StepOutput, INTERP_FLOOR,
};
pub use loss::{softmax, weighted_ce_loss, ClassProportions, LOG_FLOOR};
pub use params::{
    layer_specs, load_checkpoint, save_checkpoint, Checkpoint, Gradients, Layer,
    LayerSpec, NetworkParams,
};
pub use sampling::{ball_query, farthest_point_sampling};
