//! Amplitude-rule resampling of a window to a fixed point count.

use radar_core::RadarPoint;

use crate::error::PipelineError;

/// Total order used both for choosing what survives a cut and for the
/// duplication cycle: strongest first, ties to the earlier timestamp, then
/// the smaller range, then the remaining fields for full determinism.
fn amplitude_rank(a: &RadarPoint, b: &RadarPoint) -> std::cmp::Ordering {
    b.amplitude
        .total_cmp(&a.amplitude)
        .then(a.t.total_cmp(&b.t))
        .then(a.r.total_cmp(&b.r))
        .then(a.phi.total_cmp(&b.phi))
        .then(a.v_r.total_cmp(&b.v_r))
        .then(a.sensor_id.cmp(&b.sensor_id))
}

/// Forces a nonempty cloud to exactly `n` points.
///
/// Oversized clouds drop their lowest-amplitude points; undersized clouds
/// are padded with copies, cycling through the points in descending
/// amplitude order until the size is reached. Survivors keep their input
/// order. The boolean mask marks padded copies (`true` = duplicate), so
/// evaluation can ignore them.
pub fn resample_fixed(
    points: &[RadarPoint],
    n: usize,
) -> Result<(Vec<RadarPoint>, Vec<bool>), PipelineError> {
    if points.is_empty() {
        return Err(PipelineError::EmptyCloud);
    }
    if n == 0 {
        return Err(PipelineError::NonPositive("sample size"));
    }
    if points.len() == n {
        return Ok((points.to_vec(), vec![false; n]));
    }

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| amplitude_rank(&points[i], &points[j]));

    if points.len() > n {
        let mut keep = vec![false; points.len()];
        for &i in order.iter().take(n) {
            keep[i] = true;
        }
        let kept: Vec<RadarPoint> =
            points.iter().zip(&keep).filter(|(_, &k)| k).map(|(p, _)| *p).collect();
        return Ok((kept, vec![false; n]));
    }

    let mut out = points.to_vec();
    let mut mask = vec![false; points.len()];
    for k in 0..(n - points.len()) {
        out.push(points[order[k % order.len()]]);
        mask.push(true);
    }
    Ok((out, mask))
}
