//! Dataset directory to network-ready samples.

use std::fs::File;
use std::path::Path;

use ndarray::Array2;

use multipath_sim::{DatasetMetadata, Split};
use radar_core::read_points_csv;

use crate::error::PipelineError;
use crate::features::{compute_feature_stats, feature_dim, make_features, raw_point_features};
use crate::resample::resample_fixed;
use crate::sample::{Sample, SampleOrigin};
use crate::window::accumulate;

/// Windowing and feature knobs for sample construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub window_ms: f64,
    /// Window advance; `None` tiles without overlap (stride = window).
    pub stride_ms: Option<f64>,
    /// Fixed point count every sample is resampled to.
    pub sample_size: usize,
    /// Whether amplitude is an input channel (x, y, v_r always are).
    pub include_amplitude: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { window_ms: 200.0, stride_ms: None, sample_size: 2048, include_amplitude: true }
    }
}

/// Samples of both dataset partitions plus the training statistics that
/// standardized them.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitSamples {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub stats: crate::features::FeatureStats,
}

/// A sample before standardization: raw feature rows next to everything
/// that passes through untouched.
struct RawSample {
    positions: Array2<f64>,
    rows: Vec<Vec<f64>>,
    labels: Vec<radar_core::Label>,
    duplicate_mask: Vec<bool>,
    origin: SampleOrigin,
}

/// Loads a generated dataset directory and produces standardized samples.
///
/// Recordings are windowed and resampled per the config; standardization
/// statistics come from the training rows only (exactly the rows the
/// network will see, padded duplicates included) and are then applied to
/// both partitions.
pub fn build_samples(
    dataset_dir: &Path,
    config: &PipelineConfig,
) -> Result<SplitSamples, PipelineError> {
    if config.sample_size == 0 {
        return Err(PipelineError::NonPositive("sample_size"));
    }
    let metadata = DatasetMetadata::load(dataset_dir)?;
    let cycle = metadata.options.sensor_spec.cycle_time_ms;
    let stride = config.stride_ms.unwrap_or(config.window_ms);

    let mut raw_train = Vec::new();
    let mut raw_test = Vec::new();
    for rec in &metadata.recordings {
        let scenario = metadata
            .scenario(&rec.scenario)
            .ok_or_else(|| PipelineError::MissingScenario(rec.scenario.clone()))?;
        let recording = read_points_csv(File::open(dataset_dir.join(&rec.file))?)?;
        let windows = accumulate(&recording.points, config.window_ms, stride, cycle)?;
        for window in windows {
            let (points, duplicate_mask) = resample_fixed(&window.points, config.sample_size)?;
            let mut positions = Array2::zeros((points.len(), 2));
            let mut rows = Vec::with_capacity(points.len());
            let mut labels = Vec::with_capacity(points.len());
            for (i, p) in points.iter().enumerate() {
                let row = raw_point_features(p, &scenario.sensors, config.include_amplitude)?;
                positions[[i, 0]] = row[0];
                positions[[i, 1]] = row[1];
                rows.push(row);
                labels.push(p.label);
            }
            let raw = RawSample {
                positions,
                rows,
                labels,
                duplicate_mask,
                origin: SampleOrigin {
                    recording_id: rec.id.clone(),
                    window_start_ms: window.start_ms,
                },
            };
            match rec.split {
                Split::Train => raw_train.push(raw),
                Split::Test => raw_test.push(raw),
            }
        }
    }
    if raw_train.is_empty() {
        return Err(PipelineError::EmptySplit("train"));
    }
    if raw_test.is_empty() {
        return Err(PipelineError::EmptySplit("test"));
    }

    let dim = feature_dim(config.include_amplitude);
    let stats = compute_feature_stats(raw_train.iter().flat_map(|s| s.rows.iter()), dim);

    let finalize = |raw: Vec<RawSample>| -> Vec<Sample> {
        raw.into_iter()
            .map(|s| Sample {
                positions: s.positions,
                features: make_features(&s.rows, &stats),
                labels: s.labels,
                duplicate_mask: s.duplicate_mask,
                origin: s.origin,
            })
            .collect()
    };
    let train = finalize(raw_train);
    let test = finalize(raw_test);
    Ok(SplitSamples { train, test, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use multipath_sim::{
        build_dataset, ClutterModel, DatasetConfig, Reflector, Scenario, SensorPose, SimOptions,
        Vec2, Vru, VruCategory, VruTrajectory,
    };
    use radar_core::Label;

    fn tiny_dataset(dir: &Path) {
        let scenario = |name: &str, category: VruCategory, y0: f64| Scenario {
            name: name.into(),
            duration_ms: Some(1_000),
            sensors: vec![
                SensorPose { position: Vec2::new(0.0, 0.5), boresight_deg: 0.0 },
                SensorPose { position: Vec2::new(0.0, -0.5), boresight_deg: 0.0 },
            ],
            reflectors: vec![Reflector {
                a: Vec2::new(9.0, -12.0),
                b: Vec2::new(9.0, 12.0),
                reflectivity: 0.65,
            }],
            vrus: vec![Vru {
                category,
                trajectory: VruTrajectory {
                    start: Vec2::new(5.0, y0),
                    heading_deg: 90.0,
                    speed: 1.4,
                    path_length: 5.0,
                },
            }],
            clutter: ClutterModel::default(),
        };
        let config = DatasetConfig {
            master_seed: 11,
            repeats_per_scenario: 2,
            train_fraction: 0.5,
            scenarios: vec![
                scenario("ped", VruCategory::Pedestrian, 1.0),
                scenario("cyc", VruCategory::Cyclist, -2.0),
            ],
            options: SimOptions::default(),
        };
        build_dataset(&config, dir).unwrap();
    }

    fn small_config() -> PipelineConfig {
        PipelineConfig { sample_size: 64, ..PipelineConfig::default() }
    }

    #[test]
    fn samples_have_exact_size_and_both_splits() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        let built = build_samples(dir.path(), &small_config()).unwrap();
        // 4 recordings x 1000 ms / 200 ms windows = 5 windows each.
        assert_eq!(built.train.len() + built.test.len(), 20);
        assert!(!built.train.is_empty() && !built.test.is_empty());
        for s in built.train.iter().chain(&built.test) {
            assert_eq!(s.len(), 64);
            assert_eq!(s.positions.dim(), (64, 2));
            assert_eq!(s.features.dim(), (64, 4));
            assert_eq!(s.duplicate_mask.len(), 64);
            assert!(s.origin.window_start_ms.rem_euclid(200.0) == 0.0);
        }
    }

    #[test]
    fn training_rows_standardize_to_zero_mean_unit_variance() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        let built = build_samples(dir.path(), &small_config()).unwrap();
        let dim = 4;
        for c in 0..dim {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let mut n = 0.0;
            for s in &built.train {
                for v in s.features.column(c) {
                    sum += v;
                    sum_sq += v * v;
                    n += 1.0;
                }
            }
            let mean = sum / n;
            let var = sum_sq / n - mean * mean;
            assert!(mean.abs() < 1e-9, "channel {c} mean {mean}");
            assert!((var - 1.0).abs() < 1e-6, "channel {c} variance {var}");
        }
    }

    #[test]
    fn positions_stay_raw_meters_while_features_are_standardized() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        let built = build_samples(dir.path(), &small_config()).unwrap();
        // Ghost points must sit beyond the wall line (x > 9) in raw
        // coordinates no matter what standardization does.
        let mut ghost_seen = false;
        for s in built.train.iter().chain(&built.test) {
            for (i, &label) in s.labels.iter().enumerate() {
                if label == Label::GhostPedestrian || label == Label::GhostCyclist {
                    ghost_seen = true;
                    assert!(
                        s.positions[[i, 0]] > 9.0,
                        "ghost at raw x = {}",
                        s.positions[[i, 0]]
                    );
                }
            }
        }
        assert!(ghost_seen);
    }

    #[test]
    fn amplitude_channel_is_optional() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        let config = PipelineConfig { include_amplitude: false, ..small_config() };
        let built = build_samples(dir.path(), &config).unwrap();
        assert_eq!(built.train[0].features.dim().1, 3);
        assert_eq!(built.stats.mean.len(), 3);
    }

    #[test]
    fn rebuild_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        let a = build_samples(dir.path(), &small_config()).unwrap();
        let b = build_samples(dir.path(), &small_config()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_rows_equal_their_sources() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        // 256 points per sample exceeds a typical 200 ms window here, so
        // padding must kick in.
        let config = PipelineConfig { sample_size: 256, ..PipelineConfig::default() };
        let built = build_samples(dir.path(), &config).unwrap();
        let mut padded = 0;
        for s in built.train.iter().chain(&built.test) {
            for i in 0..s.len() {
                if s.duplicate_mask[i] {
                    padded += 1;
                    // A padded row duplicates some original row exactly.
                    let found = (0..s.len()).any(|j| {
                        !s.duplicate_mask[j]
                            && s.labels[j] == s.labels[i]
                            && s.features.row(j) == s.features.row(i)
                            && s.positions.row(j) == s.positions.row(i)
                    });
                    assert!(found, "padded row {i} has no source");
                }
            }
        }
        assert!(padded > 0, "expected some padding at sample size 256");
    }
}
