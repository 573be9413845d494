//! Per-point feature construction and training-set standardization.

use ndarray::Array2;

use multipath_sim::{SensorPose, Vec2};
use radar_core::RadarPoint;

use crate::error::PipelineError;

/// Feature column count: `x, y, v_r` and optionally `amplitude`.
pub fn feature_dim(include_amplitude: bool) -> usize {
    if include_amplitude {
        4
    } else {
        3
    }
}

/// Per-channel standardization statistics, computed on the training split
/// only and then applied everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Raw (unstandardized) feature row of one detection: ego-frame `x, y`
/// from the producing sensor's pose, then `v_r`, then `amplitude`.
pub fn raw_point_features(
    p: &RadarPoint,
    poses: &[SensorPose],
    include_amplitude: bool,
) -> Result<Vec<f64>, PipelineError> {
    let pose = poses.get(p.sensor_id as usize).ok_or(PipelineError::UnknownSensor {
        sensor_id: p.sensor_id,
        sensor_count: poses.len(),
    })?;
    let bearing = (p.phi + pose.boresight_deg).to_radians();
    let pos = pose.position + Vec2::new(bearing.cos(), bearing.sin()) * p.r;
    let mut row = vec![pos.x, pos.y, p.v_r];
    if include_amplitude {
        row.push(p.amplitude);
    }
    Ok(row)
}

/// Per-channel mean and population standard deviation over every row.
/// Channels without spread get standard deviation 1 so standardization
/// maps them to a constant zero instead of dividing by zero.
pub fn compute_feature_stats<'a, I>(rows: I, dim: usize) -> FeatureStats
where
    I: IntoIterator<Item = &'a Vec<f64>>,
{
    let mut count = 0u64;
    let mut sum = vec![0.0; dim];
    let mut sum_sq = vec![0.0; dim];
    for row in rows {
        debug_assert_eq!(row.len(), dim);
        for (c, &v) in row.iter().enumerate() {
            sum[c] += v;
            sum_sq[c] += v * v;
        }
        count += 1;
    }
    let n = (count.max(1)) as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std: Vec<f64> = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, m)| {
            let var = (sq / n - m * m).max(0.0);
            if var < 1e-24 {
                1.0
            } else {
                var.sqrt()
            }
        })
        .collect();
    FeatureStats { mean, std }
}

/// Standardizes raw feature rows into the network's input matrix.
pub fn make_features(rows: &[Vec<f64>], stats: &FeatureStats) -> Array2<f64> {
    let dim = stats.mean.len();
    let mut out = Array2::zeros((rows.len(), dim));
    for (i, row) in rows.iter().enumerate() {
        for c in 0..dim {
            out[[i, c]] = (row[c] - stats.mean[c]) / stats.std[c];
        }
    }
    out
}
