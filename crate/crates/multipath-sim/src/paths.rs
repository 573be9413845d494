//! Propagation path construction for direct and multi-path detections.
//!
//! Multi-path taxonomy: the bounce order counts all reflections along the
//! path, and the type records where the last bounce happens — type-1 on
//! the object (the return arrives from the object's true angle), type-2 on
//! the reflective surface (the return arrives from the mirror's angle).
//! The labeled ghosts are type-2 third bounces: sensor -> surface ->
//! object -> surface -> sensor, which exist whether or not the direct line
//! of sight is clear.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geometry::{
    bearing_deg, mirror_across_line, mirror_direction, segment_blocked_by, segment_intersection,
    side_of_line, Vec2,
};
use crate::scenario::Reflector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathType {
    Direct,
    Type1Second,
    Type2Second,
    Type2Third,
}

/// Geometry of one propagation path as the sensor perceives it.
#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub valid: bool,
    /// Half the round-trip path length in meters.
    pub range: f64,
    /// World-frame arrival bearing at the sensor, degrees.
    pub azimuth: f64,
    /// Reflection points in path order, sensor and return leg implied.
    pub bounce_points: Vec<Vec2>,
    pub bounce_order: u8,
    pub path_type: PathType,
}

impl PathResult {
    fn invalid(path_type: PathType, bounce_order: u8) -> Self {
        Self {
            valid: false,
            range: 0.0,
            azimuth: 0.0,
            bounce_points: Vec::new(),
            bounce_order,
            path_type,
        }
    }
}

/// First-bounce path: valid iff no reflector blocks the open segment from
/// sensor to target.
pub fn direct_path(sensor: Vec2, target: Vec2, reflectors: &[Reflector]) -> PathResult {
    let range = sensor.distance(target);
    if range <= 1e-12 {
        return PathResult::invalid(PathType::Direct, 1);
    }
    if reflectors.iter().any(|r| segment_blocked_by(sensor, target, r)) {
        return PathResult::invalid(PathType::Direct, 1);
    }
    PathResult {
        valid: true,
        range,
        azimuth: bearing_deg(sensor, target),
        bounce_points: vec![target],
        bounce_order: 1,
        path_type: PathType::Direct,
    }
}

/// Mirror construction shared by the second- and third-bounce paths: the
/// surface reflection point is where the segment from the sensor to the
/// mirrored target image crosses the reflector.
struct MirrorGeometry {
    image: Vec2,
    surface_point: Vec2,
}

fn mirror_geometry(sensor: Vec2, target: Vec2, refl: &Reflector) -> Option<MirrorGeometry> {
    let side_sensor = side_of_line(sensor, refl);
    let side_target = side_of_line(target, refl);
    // Sensor and target must lie strictly on the same side of the mirror
    // line; a target on the line has a degenerate zero-length leg.
    if side_sensor * side_target <= 0.0 {
        return None;
    }
    let image = mirror_across_line(target, refl);
    let (t, u) = segment_intersection(sensor, image, refl.a, refl.b)?;
    // The bounce must happen at an interior point of both the reflector
    // aperture and the sensor-to-image segment.
    let interior = |v: f64| v > 1e-9 && v < 1.0 - 1e-9;
    if !interior(t) || !interior(u) {
        return None;
    }
    let surface_point = sensor + (image - sensor) * t;
    Some(MirrorGeometry { image, surface_point })
}

/// Type-2 third-bounce ghost path (surface - object - surface).
///
/// The sensor perceives the mirrored image of the target: range is the
/// distance to the image and the return arrives from the direction of the
/// surface point. Validity does not depend on the direct path being clear.
pub fn type2_third_bounce_path(sensor: Vec2, target: Vec2, refl: &Reflector) -> PathResult {
    match mirror_geometry(sensor, target, refl) {
        Some(geo) => PathResult {
            valid: true,
            range: sensor.distance(geo.image),
            azimuth: bearing_deg(sensor, geo.image),
            bounce_points: vec![geo.surface_point, target, geo.surface_point],
            bounce_order: 3,
            path_type: PathType::Type2Third,
        },
        None => PathResult::invalid(PathType::Type2Third, 3),
    }
}

/// Both second-bounce paths for one sensor/target/reflector triple,
/// returned as `(type-1, type-2)`.
///
/// They share the asymmetric round trip sensor - surface - object - sensor
/// and therefore the same range; they differ in arrival direction. Type-1
/// (last bounce on the object) arrives from the target's true angle at a
/// range exceeding the direct one; type-2 (last bounce on the surface)
/// arrives from the mirror's angle. Both need a clear direct leg between
/// sensor and target in addition to the mirror aperture conditions.
pub fn second_bounce_paths(
    sensor: Vec2,
    target: Vec2,
    refl: &Reflector,
) -> (PathResult, PathResult) {
    let invalid = || {
        (
            PathResult::invalid(PathType::Type1Second, 2),
            PathResult::invalid(PathType::Type2Second, 2),
        )
    };
    let Some(geo) = mirror_geometry(sensor, target, refl) else {
        return invalid();
    };
    let direct_leg = sensor.distance(target);
    if direct_leg <= 1e-12
        || target.distance(geo.surface_point) <= 1e-12
        || segment_blocked_by(sensor, target, refl)
    {
        return invalid();
    }
    // Half of: sensor->surface + surface->target + target->sensor.
    let range = (sensor.distance(geo.image) + direct_leg) / 2.0;
    let type1 = PathResult {
        valid: true,
        range,
        azimuth: bearing_deg(sensor, target),
        bounce_points: vec![geo.surface_point, target],
        bounce_order: 2,
        path_type: PathType::Type1Second,
    };
    let type2 = PathResult {
        valid: true,
        range,
        azimuth: bearing_deg(sensor, geo.surface_point),
        bounce_points: vec![target, geo.surface_point],
        bounce_order: 2,
        path_type: PathType::Type2Second,
    };
    (type1, type2)
}

/// Rate of change of the perceived range for a moving target, static
/// sensor and static reflector. Positive = receding.
///
/// For mirror paths this is the radial velocity of the mirrored image:
/// the image moves with the target's velocity reflected across the mirror
/// direction.
pub fn ghost_radial_velocity(
    target_pos: Vec2,
    target_vel: Vec2,
    sensor: Vec2,
    path_type: PathType,
    refl: &Reflector,
) -> Result<f64, SimError> {
    match path_type {
        PathType::Direct => {
            if sensor.distance(target_pos) <= 1e-12 {
                return Err(SimError::InvalidPath("direct"));
            }
            Ok((target_pos - sensor).normalized().dot(target_vel))
        }
        PathType::Type2Third => {
            if !type2_third_bounce_path(sensor, target_pos, refl).valid {
                return Err(SimError::InvalidPath("type-2 third-bounce"));
            }
            let image = mirror_across_line(target_pos, refl);
            let image_vel = mirror_direction(target_vel, refl);
            Ok((image - sensor).normalized().dot(image_vel))
        }
        PathType::Type1Second | PathType::Type2Second => {
            let (t1, _) = second_bounce_paths(sensor, target_pos, refl);
            if !t1.valid {
                return Err(SimError::InvalidPath("second-bounce"));
            }
            let image = mirror_across_line(target_pos, refl);
            let image_vel = mirror_direction(target_vel, refl);
            let mirror_rate = (image - sensor).normalized().dot(image_vel);
            let direct_rate = (target_pos - sensor).normalized().dot(target_vel);
            Ok((mirror_rate + direct_rate) / 2.0)
        }
    }
}
