//! Batch generation of labeled recordings plus a machine-readable manifest.
//!
//! A dataset is `scenarios x repeats` recordings, each simulated with its
//! own derived seed, written as one CSV per recording plus a
//! `metadata.json` manifest carrying seeds, splits, label counts and the
//! scene geometry. Reruns with the same config are byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use radar_core::{write_points_csv, Recording};

use crate::error::SimError;
use crate::rng::{derive_seed, rng_for};
use crate::scenario::{Scenario, SimOptions};
use crate::simulate::{auto_duration_ms, simulate_frame};

/// Manifest file name inside a dataset directory.
pub const METADATA_FILE: &str = "metadata.json";

/// Full recipe for one dataset.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub master_seed: u64,
    /// Recordings generated per scenario, each with its own seed.
    pub repeats_per_scenario: u32,
    /// Fraction of recordings assigned to the training split; the
    /// assignment is random at recording level, never inside a recording.
    /// With two or more repeats per scenario it is stratified so that
    /// every scenario shows up in both partitions.
    pub train_fraction: f64,
    pub scenarios: Vec<Scenario>,
    #[serde(default)]
    pub options: SimOptions,
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.scenarios.is_empty() {
            return Err(SimError::InvalidScenario("config lists no scenarios".into()));
        }
        if self.repeats_per_scenario == 0 {
            return Err(SimError::InvalidScenario("repeats_per_scenario must be >= 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(SimError::InvalidScenario(format!(
                "train_fraction must lie strictly between 0 and 1, got {}",
                self.train_fraction
            )));
        }
        let total = self.scenarios.len() * self.repeats_per_scenario as usize;
        if total < 2 {
            return Err(SimError::TooFewRecordings(total));
        }
        let mut names = std::collections::BTreeSet::new();
        for s in &self.scenarios {
            s.validate()?;
            if !names.insert(s.name.clone()) {
                return Err(SimError::InvalidScenario(format!(
                    "duplicate scenario name '{}'",
                    s.name
                )));
            }
        }
        self.options.validate()
    }
}

/// Which partition a recording belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

/// Manifest entry for one recording.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub id: String,
    /// CSV path relative to the dataset directory.
    pub file: String,
    /// Name of the scenario that produced it.
    pub scenario: String,
    pub repeat: u32,
    pub seed: u64,
    pub split: Split,
    pub duration_ms: u64,
    pub frames: u64,
    pub points: u64,
    pub label_counts: BTreeMap<String, u64>,
}

/// Manifest for a whole dataset directory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub master_seed: u64,
    pub options: SimOptions,
    /// Scene geometry, kept verbatim so a dataset can be re-rendered and
    /// sensor poses recovered without the original config.
    pub scenarios: Vec<Scenario>,
    pub recordings: Vec<RecordingMeta>,
    pub label_totals: BTreeMap<String, u64>,
}

impl DatasetMetadata {
    pub fn load(dir: &Path) -> Result<Self, SimError> {
        let text = fs::read_to_string(dir.join(METADATA_FILE))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn scenario(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name)
    }

    pub fn recordings_in(&self, split: Split) -> impl Iterator<Item = &RecordingMeta> {
        self.recordings.iter().filter(move |r| r.split == split)
    }
}

/// Simulates every frame of one recording.
pub fn generate_recording(
    scenario: &Scenario,
    options: &SimOptions,
    seed: u64,
    id: &str,
) -> Result<Recording, SimError> {
    let duration = scenario.duration_ms.unwrap_or_else(|| auto_duration_ms(scenario));
    let frames = frame_count(duration, options.sensor_spec.cycle_time_ms);
    let mut points = Vec::new();
    for index in 0..frames {
        points.extend(simulate_frame(scenario, options, seed, index)?.points);
    }
    Ok(Recording { id: id.to_string(), points })
}

fn frame_count(duration_ms: u64, cycle_time_ms: f64) -> u64 {
    // Frame i exists iff i * cycle < duration.
    (duration_ms as f64 / cycle_time_ms).ceil() as u64
}

/// Generates all recordings into `out_dir/recordings/`, assigns the
/// recording-level train/test split, and writes `metadata.json`.
///
/// Fails if either partition would come out empty.
pub fn build_dataset(config: &DatasetConfig, out_dir: &Path) -> Result<DatasetMetadata, SimError> {
    config.validate()?;
    let rec_dir = out_dir.join("recordings");
    fs::create_dir_all(&rec_dir)?;

    let splits = assign_splits(
        config.scenarios.len(),
        config.repeats_per_scenario as usize,
        config.train_fraction,
        config.master_seed,
    )?;

    let mut recordings = Vec::with_capacity(splits.len());
    let mut label_totals: BTreeMap<String, u64> = BTreeMap::new();
    let mut rec_index = 0usize;
    for scenario in &config.scenarios {
        for repeat in 0..config.repeats_per_scenario {
            let id = format!("rec_{rec_index:03}");
            let seed = derive_seed(config.master_seed, "recording", rec_index as u64);
            let recording = generate_recording(scenario, &config.options, seed, &id)?;

            let file = format!("recordings/{id}.csv");
            let mut out = fs::File::create(out_dir.join(&file))?;
            write_points_csv(&mut out, &recording.id, &recording.points)?;
            out.flush()?;

            let mut label_counts: BTreeMap<String, u64> = BTreeMap::new();
            for p in &recording.points {
                *label_counts.entry(p.label.name().to_string()).or_insert(0) += 1;
            }
            for (name, count) in &label_counts {
                *label_totals.entry(name.clone()).or_insert(0) += count;
            }

            let duration_ms =
                scenario.duration_ms.unwrap_or_else(|| auto_duration_ms(scenario));
            recordings.push(RecordingMeta {
                id,
                file,
                scenario: scenario.name.clone(),
                repeat,
                seed,
                split: splits[rec_index],
                duration_ms,
                frames: frame_count(duration_ms, config.options.sensor_spec.cycle_time_ms),
                points: recording.points.len() as u64,
                label_counts,
            });
            rec_index += 1;
        }
    }

    let metadata = DatasetMetadata {
        master_seed: config.master_seed,
        options: config.options.clone(),
        scenarios: config.scenarios.clone(),
        recordings,
        label_totals,
    };
    let json = serde_json::to_string_pretty(&metadata)?;
    fs::write(out_dir.join(METADATA_FILE), json + "\n")?;
    Ok(metadata)
}

/// Seeded recording-level split.
///
/// With two or more repeats per scenario the split is stratified: each
/// scenario sends its rounded test share of repeats (clamped so both
/// sides stay non-empty) to the test partition, so every scene type is
/// represented on both sides of the split. With a single repeat the
/// shuffle is global across recordings instead, and degenerate
/// fractions that would empty a partition are rejected.
fn assign_splits(
    scenario_count: usize,
    repeats: usize,
    train_fraction: f64,
    master_seed: u64,
) -> Result<Vec<Split>, SimError> {
    let total = scenario_count * repeats;
    if total < 2 {
        return Err(SimError::TooFewRecordings(total));
    }
    if repeats >= 2 {
        let per_test =
            ((repeats as f64 * (1.0 - train_fraction)).round() as usize).clamp(1, repeats - 1);
        let mut splits = vec![Split::Train; total];
        for scenario in 0..scenario_count {
            let mut order: Vec<usize> = (0..repeats).collect();
            order.shuffle(&mut rng_for(master_seed, "split", scenario as u64));
            for &repeat in order.iter().take(per_test) {
                splits[scenario * repeats + repeat] = Split::Test;
            }
        }
        return Ok(splits);
    }
    let n_train = (total as f64 * train_fraction).round() as usize;
    if n_train == 0 {
        return Err(SimError::EmptySplit("train"));
    }
    if n_train >= total {
        return Err(SimError::EmptySplit("test"));
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng_for(master_seed, "split", 0));
    let mut splits = vec![Split::Test; total];
    for &i in order.iter().take(n_train) {
        splits[i] = Split::Train;
    }
    Ok(splits)
}
