//! Scene description: sensors, mirror surfaces, road users, clutter.
//!
//! A scenario is pure configuration — it says what is in the scene and how
//! it moves, not how it is sampled. Everything here serializes, so scene
//! files stay hand-editable and a stored dataset can record exactly what
//! produced it.

use serde::{Deserialize, Serialize};

use radar_core::{Label, SensorSpec};

use crate::error::SimError;
use crate::geometry::Vec2;

/// Finite specular mirror segment (wall, guardrail, parked-car flank).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reflector {
    pub a: Vec2,
    pub b: Vec2,
    /// Fraction of amplitude surviving one surface bounce, in (0, 1].
    pub reflectivity: f64,
}

impl Reflector {
    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

/// Road-user class of a simulated object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VruCategory {
    Pedestrian,
    Cyclist,
}

impl VruCategory {
    /// Label carried by the object's direct detections.
    pub fn direct_label(self) -> Label {
        match self {
            VruCategory::Pedestrian => Label::Pedestrian,
            VruCategory::Cyclist => Label::Cyclist,
        }
    }

    /// Label carried by the object's mirrored ghost detections.
    pub fn ghost_label(self) -> Label {
        match self {
            VruCategory::Pedestrian => Label::GhostPedestrian,
            VruCategory::Cyclist => Label::GhostCyclist,
        }
    }
}

/// Straight out-and-back motion: the object walks `path_length` meters
/// from `start` along `heading_deg`, turns around, and retraces, repeating
/// for as long as the recording runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VruTrajectory {
    pub start: Vec2,
    /// Direction of the outbound leg, degrees, world frame.
    pub heading_deg: f64,
    /// Walking speed in m/s, > 0.
    pub speed: f64,
    /// One-way leg length in meters, > 0.
    pub path_length: f64,
}

/// One moving road user: what it is plus how it moves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vru {
    pub category: VruCategory,
    pub trajectory: VruTrajectory,
}

/// Mounting pose of one radar. Azimuths in recordings are relative to the
/// boresight; positions are world-frame meters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorPose {
    pub position: Vec2,
    pub boresight_deg: f64,
}

/// Background detections not caused by the modeled objects.
///
/// Field-of-view clutter is scattered uniformly over the sensor's polar
/// coverage; surface clutter sits on the reflector segments themselves
/// (the surfaces are strong targets in their own right, not just mirrors).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct ClutterModel {
    /// Mean count of field-of-view clutter points per sensor per frame.
    pub fov_mean_points: f64,
    /// Mean clutter points per meter of reflector per sensor per frame.
    pub wall_points_per_meter: f64,
    /// Mean of the exponential amplitude draw for clutter points.
    pub amplitude_mean: f64,
    /// Radial-velocity spread of field-of-view clutter, m/s.
    pub fov_vr_sigma: f64,
}

impl Default for ClutterModel {
    fn default() -> Self {
        Self {
            fov_mean_points: 12.0,
            wall_points_per_meter: 0.4,
            amplitude_mean: 0.05,
            fov_vr_sigma: 0.35,
        }
    }
}

/// Whether the simulator also emits the two second-bounce path variants.
///
/// `Off` keeps recordings to direct detections, third-bounce ghosts and
/// clutter. `Background` adds second bounces labeled as background.
/// `Debug` labels the object-last-bounce variant with its own diagnostic
/// class so downstream consumers can study it; the surface-last-bounce
/// variant still becomes background.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondBounceMode {
    #[default]
    Off,
    Background,
    Debug,
}

/// Radar-facing properties of one object class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectModel {
    /// Radar cross-section in arbitrary linear units.
    pub rcs: f64,
    /// Radius of the disc the scatter points are drawn from, meters.
    pub radius: f64,
    /// Mean count of scatter points per sensor per frame.
    pub mean_points: f64,
}

/// Knobs of the measurement process itself, shared across scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct SimOptions {
    pub sensor_spec: SensorSpec,
    pub pedestrian: ObjectModel,
    pub cyclist: ObjectModel,
    /// Detections below this amplitude are dropped before quantization.
    pub amplitude_floor: f64,
    /// Log-normal spread of per-point cross-section fluctuation.
    pub rcs_fluctuation_sigma: f64,
    /// Measurement noise sigma as a fraction of each resolution cell.
    pub noise_sigma_scale: f64,
    pub second_bounce: SecondBounceMode,
    /// When several reflectors see the same object, emit a ghost off each
    /// of them rather than only the nearest.
    pub multi_reflector_ghosts: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            sensor_spec: SensorSpec::default(),
            pedestrian: ObjectModel { rcs: 50.0, radius: 0.35, mean_points: 5.0 },
            cyclist: ObjectModel { rcs: 120.0, radius: 0.8, mean_points: 8.0 },
            amplitude_floor: 0.008,
            rcs_fluctuation_sigma: 0.4,
            noise_sigma_scale: 0.5,
            second_bounce: SecondBounceMode::Off,
            multi_reflector_ghosts: false,
        }
    }
}

impl SimOptions {
    pub fn object_model(&self, category: VruCategory) -> &ObjectModel {
        match category {
            VruCategory::Pedestrian => &self.pedestrian,
            VruCategory::Cyclist => &self.cyclist,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.sensor_spec.validate().map_err(SimError::Core)?;
        for (name, model) in [("pedestrian", &self.pedestrian), ("cyclist", &self.cyclist)] {
            if !(model.rcs > 0.0) || !(model.radius > 0.0) || !(model.mean_points > 0.0) {
                return Err(SimError::InvalidScenario(format!(
                    "{name} object model needs positive rcs, radius and mean_points"
                )));
            }
        }
        if !(self.amplitude_floor >= 0.0) {
            return Err(SimError::InvalidScenario("amplitude_floor must be >= 0".into()));
        }
        if !(self.rcs_fluctuation_sigma >= 0.0) || !(self.noise_sigma_scale >= 0.0) {
            return Err(SimError::InvalidScenario(
                "noise spreads must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// One scene: static mirrors and sensors, moving road users, clutter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Recording length. `None` derives one full out-and-back lap of the
    /// slowest object.
    #[serde(default)]
    pub duration_ms: Option<u64>,
    pub sensors: Vec<SensorPose>,
    #[serde(default)]
    pub reflectors: Vec<Reflector>,
    #[serde(default)]
    pub vrus: Vec<Vru>,
    #[serde(default)]
    pub clutter: ClutterModel,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.name.is_empty() {
            return Err(SimError::InvalidScenario("scenario name is empty".into()));
        }
        if self.sensors.is_empty() {
            return Err(SimError::InvalidScenario(format!(
                "scenario '{}' has no sensors",
                self.name
            )));
        }
        if let Some(d) = self.duration_ms {
            if d == 0 {
                return Err(SimError::InvalidScenario(format!(
                    "scenario '{}' has zero duration",
                    self.name
                )));
            }
        }
        for (i, r) in self.reflectors.iter().enumerate() {
            if r.length() <= 1e-9 {
                return Err(SimError::InvalidScenario(format!(
                    "scenario '{}': reflector {i} has zero length",
                    self.name
                )));
            }
            if !(r.reflectivity > 0.0 && r.reflectivity <= 1.0) {
                return Err(SimError::InvalidScenario(format!(
                    "scenario '{}': reflector {i} reflectivity {} outside (0, 1]",
                    self.name, r.reflectivity
                )));
            }
        }
        for (i, vru) in self.vrus.iter().enumerate() {
            let t = &vru.trajectory;
            if !(t.speed > 0.0) || !(t.path_length > 0.0) {
                return Err(SimError::InvalidScenario(format!(
                    "scenario '{}': vru {i} needs positive speed and path_length",
                    self.name
                )));
            }
        }
        let c = &self.clutter;
        if !(c.fov_mean_points >= 0.0)
            || !(c.wall_points_per_meter >= 0.0)
            || !(c.amplitude_mean >= 0.0)
            || !(c.fov_vr_sigma >= 0.0)
        {
            return Err(SimError::InvalidScenario(format!(
                "scenario '{}': clutter parameters must be >= 0",
                self.name
            )));
        }
        Ok(())
    }
}
