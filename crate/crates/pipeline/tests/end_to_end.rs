//! Dataset directory to training-ready samples, exercised at the default
//! sample size and across every training setup.

use std::path::Path;

use multipath_sim::{
    build_dataset, ClutterModel, DatasetConfig, Reflector, Scenario, SensorPose, SimOptions, Vec2,
    Vru, VruCategory, VruTrajectory,
};
use pipeline::{
    build_samples, read_sample_text, remap_labels, write_sample_text, PipelineConfig, SetupId,
};

fn generate(dir: &Path) {
    let scenario = |name: &str, category: VruCategory, start: Vec2| Scenario {
        name: name.into(),
        duration_ms: Some(1_200),
        sensors: vec![
            SensorPose { position: Vec2::new(0.0, 0.6), boresight_deg: 0.0 },
            SensorPose { position: Vec2::new(0.0, -0.6), boresight_deg: 0.0 },
        ],
        reflectors: vec![Reflector {
            a: Vec2::new(10.0, -14.0),
            b: Vec2::new(10.0, 14.0),
            reflectivity: 0.7,
        }],
        vrus: vec![Vru {
            category,
            trajectory: VruTrajectory {
                start,
                heading_deg: 90.0,
                speed: 1.5,
                path_length: 6.0,
            },
        }],
        clutter: ClutterModel::default(),
    };
    let config = DatasetConfig {
        master_seed: 31,
        repeats_per_scenario: 2,
        train_fraction: 0.5,
        scenarios: vec![
            scenario("ped-lane", VruCategory::Pedestrian, Vec2::new(5.0, 0.0)),
            scenario("cyc-lane", VruCategory::Cyclist, Vec2::new(6.0, -3.0)),
        ],
        options: SimOptions::default(),
    };
    build_dataset(&config, dir).unwrap();
}

#[test]
fn default_sample_size_pads_and_remaps_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path());
    let built = build_samples(dir.path(), &PipelineConfig::default()).unwrap();

    for sample in built.train.iter().chain(&built.test) {
        // Default 2048 far exceeds these windows: padding everywhere.
        assert_eq!(sample.len(), 2048);
        assert!(sample.duplicate_mask.iter().any(|&d| d));

        for setup in SetupId::ALL {
            let mapped = remap_labels(&sample.labels, setup);
            assert_eq!(mapped.len(), sample.len());
            assert!(mapped.iter().all(|&c| c < setup.class_count()));
        }
    }

    // The grouped object class of setup 1 covers exactly the pedestrian
    // and cyclist points.
    let sample = &built.train[0];
    let grouped = remap_labels(&sample.labels, SetupId::S1);
    let fine = remap_labels(&sample.labels, SetupId::S6);
    for (g, f) in grouped.iter().zip(&fine) {
        assert_eq!(*g == 1, *f == 1 || *f == 2);
    }
}

#[test]
fn samples_survive_the_text_format() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path());
    let config = PipelineConfig { sample_size: 128, ..PipelineConfig::default() };
    let built = build_samples(dir.path(), &config).unwrap();
    for sample in built.test.iter().take(3) {
        let mut buf = Vec::new();
        write_sample_text(&mut buf, sample).unwrap();
        let back = read_sample_text(buf.as_slice()).unwrap();
        assert_eq!(&back, sample);
    }
}

#[test]
fn window_starts_tile_the_recording() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path());
    let config = PipelineConfig { sample_size: 128, ..PipelineConfig::default() };
    let built = build_samples(dir.path(), &config).unwrap();
    // 1200 ms at 200 ms windows: starts 0, 200, ..., 1000 per recording.
    let mut starts: Vec<f64> = built
        .train
        .iter()
        .chain(&built.test)
        .filter(|s| s.origin.recording_id == "rec_000")
        .map(|s| s.origin.window_start_ms)
        .collect();
    starts.sort_by(f64::total_cmp);
    assert_eq!(starts, vec![0.0, 200.0, 400.0, 600.0, 800.0, 1000.0]);
}
