//! Point-cloud file format shared by all tools: line-delimited records,
//! one detection per line, comma separated, header line required.
//!
//! Field order: `recording_id, frame_t_ms, sensor_id, r_m, phi_deg,
//! vr_mps, amplitude, label_name`. A sidecar metadata file (owned by the
//! dataset builder) carries the `SensorSpec` the recording was produced
//! with.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::types::{Label, RadarPoint};

pub const POINT_FILE_HEADER: &str =
    "recording_id,frame_t_ms,sensor_id,r_m,phi_deg,vr_mps,amplitude,label_name";

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    recording_id: String,
    frame_t_ms: f64,
    sensor_id: u8,
    r_m: f64,
    phi_deg: f64,
    vr_mps: f64,
    amplitude: f64,
    label_name: String,
}

/// One recording as read back from a point file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Recording {
    pub id: String,
    pub points: Vec<RadarPoint>,
}

/// Write points in recording order. Output bytes are deterministic for
/// identical input.
pub fn write_points_csv<W: Write>(
    w: W,
    recording_id: &str,
    points: &[RadarPoint],
) -> Result<(), CoreError> {
    let mut writer = csv::Writer::from_writer(w);
    for p in points {
        writer.serialize(Row {
            recording_id: recording_id.to_string(),
            frame_t_ms: p.t,
            sensor_id: p.sensor_id,
            r_m: p.r,
            phi_deg: p.phi,
            vr_mps: p.v_r,
            amplitude: p.amplitude,
            label_name: p.label.name().to_string(),
        })?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(r: R) -> Result<Recording, CoreError> {
    let mut reader = csv::Reader::from_reader(r);
    let mut recording = Recording::default();
    for (idx, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| CoreError::Parse {
            record: idx + 1,
            message: e.to_string(),
        })?;
        let label = Label::parse(&row.label_name).map_err(|e| CoreError::Parse {
            record: idx + 1,
            message: e.to_string(),
        })?;
        if recording.points.is_empty() {
            recording.id = row.recording_id.clone();
        } else if recording.id != row.recording_id {
            return Err(CoreError::Parse {
                record: idx + 1,
                message: format!(
                    "mixed recording ids `{}` and `{}` in one file",
                    recording.id, row.recording_id
                ),
            });
        }
        recording.points.push(RadarPoint {
            r: row.r_m,
            phi: row.phi_deg,
            v_r: row.vr_mps,
            amplitude: row.amplitude,
            t: row.frame_t_ms,
            sensor_id: row.sensor_id,
            label,
        });
    }
    Ok(recording)
}
