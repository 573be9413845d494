use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Membership is inclusive at both ends.
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Operational bands and resolutions of the radar sensor.
///
/// Defaults correspond to the 76-77 GHz automotive sensor used throughout:
/// range 0.15-153 m at 0.15 m resolution, azimuth +-70 deg at 1.8 deg,
/// Doppler +-44.3 m/s at 0.087 m/s, 100 ms cycle time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    /// Range band in meters.
    pub range_band: Interval,
    /// Azimuth band in degrees, 0 = boresight, counter-clockwise positive.
    pub azimuth_band: Interval,
    /// Radial-velocity band in m/s, positive = receding.
    pub doppler_band: Interval,
    /// Range resolution in meters.
    pub range_res: f64,
    /// Azimuth resolution in degrees.
    pub azimuth_res: f64,
    /// Radial-velocity resolution in m/s.
    pub doppler_res: f64,
    /// Measurement cycle time in milliseconds.
    pub cycle_time_ms: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            range_band: Interval::new(0.15, 153.0),
            azimuth_band: Interval::new(-70.0, 70.0),
            doppler_band: Interval::new(-44.3, 44.3),
            range_res: 0.15,
            azimuth_res: 1.8,
            doppler_res: 0.087,
            cycle_time_ms: 100.0,
        }
    }
}

impl SensorSpec {
    /// Check that all resolutions are strictly positive and every band is
    /// nonempty with `lo < hi`.
    pub fn validate(&self) -> Result<(), CoreError> {
        let bands = [
            ("range_band", self.range_band),
            ("azimuth_band", self.azimuth_band),
            ("doppler_band", self.doppler_band),
        ];
        for (name, band) in bands {
            if !(band.lo < band.hi) {
                return Err(CoreError::InvalidSpec(format!(
                    "{name} must satisfy lo < hi, got [{}, {}]",
                    band.lo, band.hi
                )));
            }
        }
        let resolutions = [
            ("range_res", self.range_res),
            ("azimuth_res", self.azimuth_res),
            ("doppler_res", self.doppler_res),
            ("cycle_time_ms", self.cycle_time_ms),
        ];
        for (name, res) in resolutions {
            if !(res > 0.0) {
                return Err(CoreError::InvalidSpec(format!(
                    "{name} must be strictly positive, got {res}"
                )));
            }
        }
        Ok(())
    }
}

/// Ground-truth class of a detection.
///
/// `Type1SecondBounce` is a simulator-only debug value: second-bounce
/// multi-path returns are unlabeled in training-ready data and remap to
/// `Background` unless a debug flag keeps them distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Background,
    Pedestrian,
    Cyclist,
    GhostPedestrian,
    GhostCyclist,
    Type1SecondBounce,
}

impl Label {
    /// All six values, in canonical order.
    pub const ALL: [Label; 6] = [
        Label::Background,
        Label::Pedestrian,
        Label::Cyclist,
        Label::GhostPedestrian,
        Label::GhostCyclist,
        Label::Type1SecondBounce,
    ];

    /// The five classes that may appear in training-ready data.
    pub const TRAINABLE: [Label; 5] = [
        Label::Background,
        Label::Pedestrian,
        Label::Cyclist,
        Label::GhostPedestrian,
        Label::GhostCyclist,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Label::Background => "background",
            Label::Pedestrian => "pedestrian",
            Label::Cyclist => "cyclist",
            Label::GhostPedestrian => "ghost_pedestrian",
            Label::GhostCyclist => "ghost_cyclist",
            Label::Type1SecondBounce => "type1_second_bounce",
        }
    }

    pub fn parse(name: &str) -> Result<Label, CoreError> {
        Label::ALL
            .iter()
            .copied()
            .find(|l| l.name() == name)
            .ok_or_else(|| CoreError::UnknownLabel(name.to_string()))
    }

    pub fn is_ghost(&self) -> bool {
        matches!(self, Label::GhostPedestrian | Label::GhostCyclist)
    }

    pub fn is_real_object(&self) -> bool {
        matches!(self, Label::Pedestrian | Label::Cyclist)
    }

    /// Debug labels fold into `Background` for training-ready data.
    pub fn to_trainable(self) -> Label {
        match self {
            Label::Type1SecondBounce => Label::Background,
            other => other,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One radar detection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarPoint {
    /// Range in meters.
    pub r: f64,
    /// Sensor-frame azimuth in degrees, 0 = boresight, CCW positive.
    pub phi: f64,
    /// Radial velocity in m/s, positive = receding.
    pub v_r: f64,
    /// Linear amplitude, >= 0.
    pub amplitude: f64,
    /// Milliseconds since recording start.
    pub t: f64,
    /// Sensor that produced the detection.
    pub sensor_id: u8,
    pub label: Label,
}

/// All detections of one measurement cycle, possibly from several sensors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub points: Vec<RadarPoint>,
}
