//! Shared domain types for automotive radar point clouds: detections,
//! sensor specifications, label taxonomy, polar/Cartesian conversion and
//! sensor-grid quantization.

mod coords;
mod error;
mod io;
mod quantize;
mod types;

pub use coords::{cartesian_to_polar, polar_to_cartesian, wrap_degrees};
pub use error::CoreError;
pub use io::{read_points_csv, write_points_csv, Recording, POINT_FILE_HEADER};
pub use quantize::{clip_and_quantize_point, quantize};
pub use types::{Frame, Interval, Label, RadarPoint, SensorSpec};
