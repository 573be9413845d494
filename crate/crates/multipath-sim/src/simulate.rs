//! Frame-level measurement synthesis.
//!
//! One frame is built sensor by sensor: every road user contributes a
//! handful of scatter points, each scatter point contributes its direct
//! detection (if the line of sight is clear) and its mirrored third-bounce
//! ghost (clear line of sight or not), plus optional second bounces; the
//! scene then gets field-of-view and surface clutter. Every candidate
//! passes through measurement noise, the amplitude floor, and the sensor's
//! grid quantization and band clipping.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};

use radar_core::{clip_and_quantize_point, wrap_degrees, Frame, Label, RadarPoint};

use crate::amplitude::amplitude_model;
use crate::error::SimError;
use crate::geometry::{point_to_segment_distance, segment_blocked_by, Vec2};
use crate::paths::{
    direct_path, ghost_radial_velocity, second_bounce_paths, type2_third_bounce_path, PathResult,
    PathType,
};
use crate::rng::{derive_seed, rng_for};
use crate::scenario::{Scenario, SecondBounceMode, SensorPose, SimOptions, VruTrajectory};

/// Position and velocity of an out-and-back trajectory at `t_s` seconds.
///
/// The object shuttles between `start` and the point `path_length` meters
/// along `heading_deg`, reversing instantly at each end. At the exact
/// turnaround instant the returning leg's velocity is reported.
pub fn trajectory_state(traj: &VruTrajectory, t_s: f64) -> (Vec2, Vec2) {
    let dir = {
        let rad = traj.heading_deg.to_radians();
        Vec2::new(rad.cos(), rad.sin())
    };
    let lap = 2.0 * traj.path_length / traj.speed;
    let s = t_s.rem_euclid(lap);
    if s * traj.speed < traj.path_length {
        (traj.start + dir * (traj.speed * s), dir * traj.speed)
    } else {
        let walked = 2.0 * traj.path_length - traj.speed * s;
        (traj.start + dir * walked, -dir * traj.speed)
    }
}

/// Recording length covering one full out-and-back lap of the slowest
/// road user, in milliseconds; scenes without road users get a short
/// fixed window.
pub fn auto_duration_ms(scenario: &Scenario) -> u64 {
    scenario
        .vrus
        .iter()
        .map(|vru| {
            let t = &vru.trajectory;
            (2.0 * t.path_length / t.speed * 1000.0).ceil() as u64
        })
        .max()
        .unwrap_or(2_000)
}

/// Scatter centers for one object in one frame: a Poisson-distributed
/// count (at least one) of points uniform over the object's disc.
pub fn scatter_object(
    center: Vec2,
    radius: f64,
    mean_points: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec2> {
    let count = Poisson::new(mean_points)
        .expect("mean_points validated > 0")
        .sample(rng)
        .max(1.0) as usize;
    (0..count)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            center + Vec2::new(theta.cos(), theta.sin()) * r
        })
        .collect()
}

/// One propagation path ready to be measured.
struct Candidate {
    path: PathResult,
    v_r: f64,
    amplitude: f64,
    label: Label,
}

/// Applies the amplitude floor, measurement noise, grid quantization and
/// band clipping; `None` means the candidate never shows up in the frame.
fn measure(
    cand: Candidate,
    pose: &SensorPose,
    sensor_id: u8,
    t_ms: f64,
    options: &SimOptions,
    rng: &mut ChaCha8Rng,
) -> Option<RadarPoint> {
    let spec = &options.sensor_spec;
    let scale = options.noise_sigma_scale;
    let mut noise = |sigma: f64| -> f64 {
        if sigma > 0.0 {
            Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
        } else {
            0.0
        }
    };
    // Draws happen unconditionally and in fixed order so the stream stays
    // aligned no matter which candidates survive.
    let dr = noise(scale * spec.range_res);
    let dphi = noise(scale * spec.azimuth_res);
    let dv = noise(scale * spec.doppler_res);

    if cand.amplitude < options.amplitude_floor {
        return None;
    }
    let raw = RadarPoint {
        r: cand.path.range + dr,
        phi: wrap_degrees(cand.path.azimuth - pose.boresight_deg) + dphi,
        v_r: cand.v_r + dv,
        amplitude: cand.amplitude,
        t: t_ms,
        sensor_id,
        label: cand.label,
    };
    clip_and_quantize_point(&raw, spec)
}

/// Synthesizes the complete multi-sensor frame at index `frame_index`
/// (time `frame_index * cycle_time`). Deterministic in
/// `(scenario, options, master_seed, frame_index)`.
pub fn simulate_frame(
    scenario: &Scenario,
    options: &SimOptions,
    master_seed: u64,
    frame_index: u64,
) -> Result<Frame, SimError> {
    scenario.validate()?;
    options.validate()?;
    let duration = scenario.duration_ms.unwrap_or_else(|| auto_duration_ms(scenario)) as f64;
    let t_ms = frame_index as f64 * options.sensor_spec.cycle_time_ms;
    if t_ms >= duration {
        return Err(SimError::FrameOutOfRange { t: t_ms, duration });
    }
    let t_s = t_ms / 1000.0;
    let frame_seed = derive_seed(master_seed, "frame", frame_index);

    let mut points = Vec::new();
    for (sensor_idx, pose) in scenario.sensors.iter().enumerate() {
        let sensor_id = sensor_idx as u8;
        let mut rng = rng_for(frame_seed, "sensor", sensor_idx as u64);
        let sensor = pose.position;

        for vru in &scenario.vrus {
            let (center, velocity) = trajectory_state(&vru.trajectory, t_s);
            let model = options.object_model(vru.category);
            let scatter = scatter_object(center, model.radius, model.mean_points, &mut rng);

            // Reflectors that mirror this object in this frame: all of
            // them, or only the closest one.
            let mirrors: Vec<usize> = if options.multi_reflector_ghosts {
                (0..scenario.reflectors.len()).collect()
            } else {
                scenario
                    .reflectors
                    .iter()
                    .enumerate()
                    .min_by(|(_, ra), (_, rb)| {
                        point_to_segment_distance(center, ra.a, ra.b)
                            .total_cmp(&point_to_segment_distance(center, rb.a, rb.b))
                    })
                    .map(|(i, _)| vec![i])
                    .unwrap_or_default()
            };

            for &p in &scatter {
                let fluctuated_rcs = |rng: &mut ChaCha8Rng| -> f64 {
                    if options.rcs_fluctuation_sigma > 0.0 {
                        model.rcs
                            * Normal::new(0.0, options.rcs_fluctuation_sigma)
                                .expect("finite sigma")
                                .sample(rng)
                                .exp()
                    } else {
                        model.rcs
                    }
                };

                let direct = direct_path(sensor, p, &scenario.reflectors);
                if direct.valid {
                    let v_r = (p - sensor).normalized().dot(velocity);
                    let amplitude = amplitude_model(fluctuated_rcs(&mut rng), 1.0, direct.range)
                        .expect("valid path has positive range");
                    let cand = Candidate {
                        path: direct,
                        v_r,
                        amplitude,
                        label: vru.category.direct_label(),
                    };
                    points.extend(measure(cand, pose, sensor_id, t_ms, options, &mut rng));
                }

                for &ri in &mirrors {
                    let refl = &scenario.reflectors[ri];
                    let ghost = type2_third_bounce_path(sensor, p, refl);
                    if ghost.valid {
                        let v_r =
                            ghost_radial_velocity(p, velocity, sensor, PathType::Type2Third, refl)
                                .expect("path checked valid");
                        let amplitude = amplitude_model(
                            fluctuated_rcs(&mut rng),
                            refl.reflectivity * refl.reflectivity,
                            ghost.range,
                        )
                        .expect("valid path has positive range");
                        let cand = Candidate {
                            path: ghost,
                            v_r,
                            amplitude,
                            label: vru.category.ghost_label(),
                        };
                        points.extend(measure(cand, pose, sensor_id, t_ms, options, &mut rng));
                    }

                    if options.second_bounce != SecondBounceMode::Off {
                        let (t1, t2) = second_bounce_paths(sensor, p, refl);
                        if t1.valid {
                            // Both second-bounce variants share the range
                            // and therefore the range rate.
                            let v_r = ghost_radial_velocity(
                                p,
                                velocity,
                                sensor,
                                PathType::Type1Second,
                                refl,
                            )
                            .expect("path checked valid");
                            let t1_label = match options.second_bounce {
                                SecondBounceMode::Debug => Label::Type1SecondBounce,
                                _ => Label::Background,
                            };
                            for (path, label) in [(t1, t1_label), (t2, Label::Background)] {
                                let amplitude = amplitude_model(
                                    fluctuated_rcs(&mut rng),
                                    refl.reflectivity,
                                    path.range,
                                )
                                .expect("valid path has positive range");
                                let cand = Candidate { path, v_r, amplitude, label };
                                points.extend(measure(
                                    cand, pose, sensor_id, t_ms, options, &mut rng,
                                ));
                            }
                        }
                    }
                }
            }
        }

        // Field-of-view clutter: uniform over the sensor's polar coverage,
        // so it needs no boresight correction.
        let clutter = &scenario.clutter;
        let spec = &options.sensor_spec;
        if clutter.fov_mean_points > 0.0 {
            let count =
                Poisson::new(clutter.fov_mean_points).expect("positive mean").sample(&mut rng)
                    as usize;
            let amp = Exp::new(1.0 / clutter.amplitude_mean.max(1e-12)).expect("positive rate");
            for _ in 0..count {
                let r = rng.random_range(spec.range_band.lo..spec.range_band.hi);
                let phi = rng.random_range(spec.azimuth_band.lo..spec.azimuth_band.hi);
                let v_r = if clutter.fov_vr_sigma > 0.0 {
                    Normal::new(0.0, clutter.fov_vr_sigma).expect("finite").sample(&mut rng)
                } else {
                    0.0
                };
                let amplitude = amp.sample(&mut rng);
                if amplitude < options.amplitude_floor {
                    continue;
                }
                let raw = RadarPoint {
                    r,
                    phi,
                    v_r,
                    amplitude,
                    t: t_ms,
                    sensor_id,
                    label: Label::Background,
                };
                points.extend(clip_and_quantize_point(&raw, spec));
            }
        }

        // Surface clutter: the reflector segments are targets themselves.
        // Amplitude comes from the clutter draw, not the cross-section
        // model, so these points skip `measure`'s amplitude handling.
        if clutter.wall_points_per_meter > 0.0 {
            for (ri, refl) in scenario.reflectors.iter().enumerate() {
                let mean = clutter.wall_points_per_meter * refl.length();
                if mean <= 0.0 {
                    continue;
                }
                let count = Poisson::new(mean).expect("positive mean").sample(&mut rng) as usize;
                let amp =
                    Exp::new(1.0 / clutter.amplitude_mean.max(1e-12)).expect("positive rate");
                for _ in 0..count {
                    let u: f64 = rng.random();
                    let p = refl.a + (refl.b - refl.a) * u;
                    let amplitude = amp.sample(&mut rng);
                    let blocked = scenario.reflectors.iter().enumerate().any(|(rj, other)| {
                        rj != ri && segment_blocked_by(sensor, p, other)
                    });
                    if blocked || amplitude < options.amplitude_floor {
                        continue;
                    }
                    let path = direct_path(sensor, p, &[]);
                    if !path.valid {
                        continue;
                    }
                    let cand =
                        Candidate { path, v_r: 0.0, amplitude, label: Label::Background };
                    points.extend(measure(cand, pose, sensor_id, t_ms, options, &mut rng));
                }
            }
        }
    }

    Ok(Frame { t: t_ms, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ClutterModel, Reflector, Vru, VruCategory};
    use rand::SeedableRng;

    fn walk(start: Vec2, heading_deg: f64, speed: f64, path_length: f64) -> VruTrajectory {
        VruTrajectory { start, heading_deg, speed, path_length }
    }

    #[test]
    fn trajectory_walks_out_and_back() {
        let traj = walk(Vec2::new(0.0, 0.0), 0.0, 2.0, 10.0);
        let (p, v) = trajectory_state(&traj, 0.0);
        assert!(p.x.abs() < 1e-12 && (v.x - 2.0).abs() < 1e-12);
        let (p, v) = trajectory_state(&traj, 2.5);
        assert!((p.x - 5.0).abs() < 1e-12 && (v.x - 2.0).abs() < 1e-12);
        // Turnaround at t = 5 s, halfway home at t = 7.5 s.
        let (p, v) = trajectory_state(&traj, 7.5);
        assert!((p.x - 5.0).abs() < 1e-12 && (v.x + 2.0).abs() < 1e-12);
        // Full lap: back at the start, outbound again.
        let (p, v) = trajectory_state(&traj, 10.0);
        assert!(p.x.abs() < 1e-12 && (v.x - 2.0).abs() < 1e-12);
        // Heading is honored.
        let traj = walk(Vec2::new(1.0, 1.0), 90.0, 1.0, 4.0);
        let (p, v) = trajectory_state(&traj, 1.0);
        assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 2.0).abs() < 1e-12);
        assert!(v.x.abs() < 1e-12 && (v.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trajectory_never_leaves_the_leg() {
        let traj = walk(Vec2::new(3.0, -2.0), 37.0, 1.3, 6.0);
        for i in 0..1000 {
            let (p, _) = trajectory_state(&traj, i as f64 * 0.137);
            let along = (p - traj.start).norm();
            assert!(along <= traj.path_length + 1e-9, "excursion {along}");
        }
    }

    #[test]
    fn auto_duration_covers_slowest_lap() {
        let mut scenario = two_sensor_scene();
        // Slowest object: 8 m at 1 m/s out and back = 16 s.
        scenario.vrus.push(Vru {
            category: VruCategory::Cyclist,
            trajectory: walk(Vec2::new(0.0, 10.0), 0.0, 1.0, 8.0),
        });
        assert_eq!(auto_duration_ms(&scenario), 16_000);
        scenario.vrus.clear();
        assert_eq!(auto_duration_ms(&scenario), 2_000);
    }

    #[test]
    fn scatter_count_tracks_poisson_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mean = 6.0;
        let draws = 10_000;
        let mut total = 0usize;
        for _ in 0..draws {
            let pts = scatter_object(Vec2::new(1.0, 2.0), 0.4, mean, &mut rng);
            assert!(!pts.is_empty());
            for p in &pts {
                assert!(p.distance(Vec2::new(1.0, 2.0)) <= 0.4 + 1e-12);
            }
            total += pts.len();
        }
        // Poisson(6) truncated at 1 barely shifts the mean; 3 sigma of the
        // sample mean is ~0.073.
        let sample_mean = total as f64 / draws as f64;
        assert!((sample_mean - mean).abs() < 0.08, "sample mean {sample_mean}");
    }

    fn two_sensor_scene() -> Scenario {
        Scenario {
            name: "test".into(),
            duration_ms: Some(4_000),
            sensors: vec![
                SensorPose { position: Vec2::new(0.0, 0.5), boresight_deg: 0.0 },
                SensorPose { position: Vec2::new(0.0, -0.5), boresight_deg: 0.0 },
            ],
            reflectors: vec![Reflector {
                a: Vec2::new(10.0, -20.0),
                b: Vec2::new(10.0, 20.0),
                reflectivity: 0.6,
            }],
            vrus: vec![Vru {
                category: VruCategory::Pedestrian,
                trajectory: walk(Vec2::new(5.0, 5.0), 90.0, 1.4, 6.0),
            }],
            clutter: ClutterModel::default(),
        }
    }

    fn quiet(mut scenario: Scenario) -> Scenario {
        scenario.clutter.fov_mean_points = 0.0;
        scenario.clutter.wall_points_per_meter = 0.0;
        scenario
    }

    #[test]
    fn frames_are_deterministic_and_time_stamped() {
        let scenario = two_sensor_scene();
        let options = SimOptions::default();
        let a = simulate_frame(&scenario, &options, 99, 7).unwrap();
        let b = simulate_frame(&scenario, &options, 99, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.t - 700.0).abs() < 1e-12);
        assert!(a.points.iter().all(|p| (p.t - 700.0).abs() < 1e-12));
        // Different frames and different seeds give different draws.
        let c = simulate_frame(&scenario, &options, 99, 8).unwrap();
        assert_ne!(a.points, c.points);
        let d = simulate_frame(&scenario, &options, 100, 7).unwrap();
        assert_ne!(a.points, d.points);
    }

    #[test]
    fn frame_index_beyond_duration_errors() {
        let scenario = two_sensor_scene();
        let options = SimOptions::default();
        // Duration 4000 ms at 100 ms cycle: indices 0..39 are valid.
        assert!(simulate_frame(&scenario, &options, 1, 39).is_ok());
        assert!(matches!(
            simulate_frame(&scenario, &options, 1, 40),
            Err(SimError::FrameOutOfRange { .. })
        ));
    }

    #[test]
    fn every_point_is_on_grid_in_band_and_above_floor() {
        let scenario = two_sensor_scene();
        let options = SimOptions::default();
        let spec = &options.sensor_spec;
        for idx in 0..20 {
            let frame = simulate_frame(&scenario, &options, 3, idx).unwrap();
            assert!(!frame.points.is_empty());
            for p in &frame.points {
                for (value, res, band) in [
                    (p.r, spec.range_res, spec.range_band),
                    (p.phi, spec.azimuth_res, spec.azimuth_band),
                    (p.v_r, spec.doppler_res, spec.doppler_band),
                ] {
                    let snapped = radar_core::quantize(value, res);
                    assert!((snapped - value).abs() < 1e-9, "off grid: {value} at res {res}");
                    assert!(band.contains(value));
                }
                assert!(p.amplitude >= options.amplitude_floor);
            }
        }
    }

    #[test]
    fn ghost_mirrors_position_and_doppler() {
        // Pedestrian walks +x, away from the sensors and toward the wall:
        // direct detections recede (v_r > 0) while the mirrored image
        // approaches (v_r < 0), at greater range and shallower bearing.
        let mut scenario = two_sensor_scene();
        scenario.vrus[0].trajectory = walk(Vec2::new(5.0, 5.0), 0.0, 1.4, 3.0);
        let mut options = SimOptions::default();
        options.noise_sigma_scale = 0.0;
        options.rcs_fluctuation_sigma = 0.0;
        let frame = simulate_frame(&scenario, &options, 11, 0).unwrap();
        let ghosts: Vec<_> =
            frame.points.iter().filter(|p| p.label == Label::GhostPedestrian).collect();
        let directs: Vec<_> =
            frame.points.iter().filter(|p| p.label == Label::Pedestrian).collect();
        assert!(!ghosts.is_empty() && !directs.is_empty());
        // Object near (5, 5) at frame 0, image near (15, 5).
        for g in &ghosts {
            assert!(g.r > 14.0 && g.r < 18.0, "ghost range {}", g.r);
            assert!(g.phi.abs() < 30.0, "ghost bearing {}", g.phi);
            assert!(g.v_r < 0.0, "ghost should close in, v_r = {}", g.v_r);
        }
        for d in &directs {
            assert!(d.v_r > 0.0, "object recedes, v_r = {}", d.v_r);
        }
        let mean_direct_r: f64 = directs.iter().map(|p| p.r).sum::<f64>() / directs.len() as f64;
        let mean_ghost_r: f64 = ghosts.iter().map(|p| p.r).sum::<f64>() / ghosts.len() as f64;
        assert!(mean_ghost_r > mean_direct_r + 5.0);
    }

    #[test]
    fn ghost_survives_direct_occlusion() {
        // A small obstacle cuts both sensors' line of sight to the
        // pedestrian but stays clear of the mirror legs: direct detections
        // vanish, third-bounce ghosts remain.
        let mut scenario = quiet(two_sensor_scene());
        scenario.reflectors.push(Reflector {
            a: Vec2::new(2.0, 2.8),
            b: Vec2::new(3.2, 1.6),
            reflectivity: 0.6,
        });
        let mut options = SimOptions::default();
        options.noise_sigma_scale = 0.0;
        options.multi_reflector_ghosts = true;
        let frame = simulate_frame(&scenario, &options, 21, 0).unwrap();
        let n_direct = frame.points.iter().filter(|p| p.label == Label::Pedestrian).count();
        let n_ghost =
            frame.points.iter().filter(|p| p.label == Label::GhostPedestrian).count();
        assert_eq!(n_direct, 0, "line of sight is blocked");
        assert!(n_ghost > 0, "third-bounce ghost needs no direct line of sight");
    }

    #[test]
    fn second_bounce_modes_control_extra_points_and_labels() {
        let scenario = quiet(two_sensor_scene());
        let mut options = SimOptions::default();
        let count_debug = |frame: &Frame| {
            frame.points.iter().filter(|p| p.label == Label::Type1SecondBounce).count()
        };

        options.second_bounce = SecondBounceMode::Off;
        let off = simulate_frame(&scenario, &options, 31, 0).unwrap();
        assert_eq!(count_debug(&off), 0);

        options.second_bounce = SecondBounceMode::Background;
        let bg = simulate_frame(&scenario, &options, 31, 0).unwrap();
        assert_eq!(count_debug(&bg), 0);
        assert!(
            bg.points.len() > off.points.len(),
            "second bounces add background points: {} vs {}",
            bg.points.len(),
            off.points.len()
        );

        options.second_bounce = SecondBounceMode::Debug;
        let debug = simulate_frame(&scenario, &options, 31, 0).unwrap();
        assert!(count_debug(&debug) > 0);
        assert_eq!(debug.points.len(), bg.points.len());
    }

    #[test]
    fn empty_scene_yields_only_background() {
        let scenario = Scenario {
            name: "empty".into(),
            duration_ms: Some(1_000),
            sensors: vec![SensorPose { position: Vec2::new(0.0, 0.0), boresight_deg: 0.0 }],
            reflectors: vec![],
            vrus: vec![],
            clutter: ClutterModel::default(),
        };
        let frame = simulate_frame(&scenario, &SimOptions::default(), 1, 0).unwrap();
        assert!(!frame.points.is_empty());
        assert!(frame.points.iter().all(|p| p.label == Label::Background));
    }

    #[test]
    fn boresight_rotation_shifts_reported_azimuth() {
        let mut scenario = quiet(two_sensor_scene());
        let mut options = SimOptions::default();
        options.noise_sigma_scale = 0.0;
        scenario.sensors = vec![SensorPose { position: Vec2::new(0.0, 0.0), boresight_deg: 0.0 }];
        let straight = simulate_frame(&scenario, &options, 55, 0).unwrap();
        scenario.sensors = vec![SensorPose { position: Vec2::new(0.0, 0.0), boresight_deg: 30.0 }];
        let rotated = simulate_frame(&scenario, &options, 55, 0).unwrap();
        // Same scene, same draws: each reported azimuth drops by the
        // boresight rotation, up to one azimuth grid cell.
        assert_eq!(straight.points.len(), rotated.points.len());
        assert!(!straight.points.is_empty());
        for (a, b) in straight.points.iter().zip(&rotated.points) {
            assert!((a.phi - (b.phi + 30.0)).abs() <= options.sensor_spec.azimuth_res + 1e-9);
        }
    }
}
