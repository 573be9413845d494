//! Temporal accumulation of detections into point-cloud windows.

use radar_core::RadarPoint;

use crate::error::PipelineError;

/// All detections, from every sensor, inside one accumulation window.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    /// Window start in milliseconds; the window covers
    /// `[start_ms, start_ms + window_ms)`.
    pub start_ms: f64,
    pub points: Vec<RadarPoint>,
}

/// Slices a time-ordered recording into accumulation windows.
///
/// Windows start at 0 ms and advance by `stride_ms` (pass the window
/// length for non-overlapping tiling); each collects every point with
/// `t` in `[start, start + window_ms)`, all sensors merged. Empty windows
/// are skipped. The window must be a whole number of sensor cycles so a
/// window always aggregates complete frames.
pub fn accumulate(
    points: &[RadarPoint],
    window_ms: f64,
    stride_ms: f64,
    cycle_time_ms: f64,
) -> Result<Vec<Window>, PipelineError> {
    if !(window_ms > 0.0) {
        return Err(PipelineError::NonPositive("window_ms"));
    }
    if !(stride_ms > 0.0) {
        return Err(PipelineError::NonPositive("stride_ms"));
    }
    if !(cycle_time_ms > 0.0) {
        return Err(PipelineError::NonPositive("cycle_time_ms"));
    }
    let cycles = window_ms / cycle_time_ms;
    if (cycles - cycles.round()).abs() > 1e-9 || cycles.round() < 1.0 {
        return Err(PipelineError::WindowNotCycleMultiple { window_ms, cycle_time_ms });
    }
    for i in 1..points.len() {
        if points[i].t < points[i - 1].t {
            return Err(PipelineError::UnorderedPoints(i));
        }
    }
    let Some(last) = points.last() else {
        return Ok(Vec::new());
    };

    let mut windows = Vec::new();
    let mut start = 0.0;
    while start <= last.t {
        let end = start + window_ms;
        let lo = points.partition_point(|p| p.t < start);
        let hi = points.partition_point(|p| p.t < end);
        if hi > lo {
            windows.push(Window { start_ms: start, points: points[lo..hi].to_vec() });
        }
        start += stride_ms;
    }
    Ok(windows)
}
