//! TOML config files for the experiment-facing commands.
//!
//! One flat file per command.  Paths inside a config resolve relative to
//! the config file's own directory, so bundled configs work from any
//! working directory.  Unknown fields are rejected with the offending name
//! and line, courtesy of strict deserialization.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use pipeline::{feature_dim, PipelineConfig, SetupId};
use pointseg::{MsgLevelConfig, NetworkConfig};
use trainer::{LossWeighting, TrainConfig};

use crate::util::{config_error, CliResult};

/// Read and parse a TOML config, classifying every failure as a config
/// error (exit code 2).
pub fn load_toml<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| config_error(format!("invalid config {}:\n{e}", path.display())))
}

/// Resolve a config-internal path against the config file's directory.
pub fn resolve_relative(config_path: &Path, inner: &Path) -> PathBuf {
    if inner.is_absolute() {
        inner.to_path_buf()
    } else {
        config_path.parent().unwrap_or(Path::new(".")).join(inner)
    }
}

/// Map a numeric setup id onto [`SetupId`], spelling out the valid range.
pub fn setup_from_number(n: u8) -> CliResult<SetupId> {
    SetupId::from_number(n)
        .map_err(|_| config_error(format!("unknown setup id {n}; valid ids: 1, 2, 3, 4, 5, 6")))
}

/// Parse a `--setups` list like `"1,2,3"`.
pub fn parse_setups(text: &str) -> CliResult<Vec<SetupId>> {
    let mut setups = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        let n: u8 = token
            .parse()
            .map_err(|_| config_error(format!("setup list entry '{token}' is not a number")))?;
        let setup = setup_from_number(n)?;
        if setups.contains(&setup) {
            return Err(config_error(format!("setup {n} appears twice in the list")));
        }
        setups.push(setup);
    }
    if setups.is_empty() {
        return Err(config_error("the setup list is empty"));
    }
    Ok(setups)
}

// ---------------------------------------------------------------------------
// Experiment config
// ---------------------------------------------------------------------------

/// Config for `train`, `evaluate` and `experiment-matrix`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Dataset directory, relative to this config file.
    pub dataset_dir: PathBuf,
    /// Label setup 1-6; required by `train` and `evaluate`, ignored by
    /// `experiment-matrix` (which takes `--setups`).
    #[serde(default)]
    pub setup: Option<u8>,
    #[serde(default)]
    pub pipeline: PipelineSection,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub trainer: TrainerSection,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        load_toml(path)
    }

    pub fn dataset_dir_resolved(&self, config_path: &Path) -> PathBuf {
        resolve_relative(config_path, &self.dataset_dir)
    }

    pub fn required_setup(&self, config_path: &Path) -> CliResult<SetupId> {
        let n = self.setup.ok_or_else(|| {
            config_error(format!(
                "config {} needs a top-level `setup = <1-6>` for this command",
                config_path.display()
            ))
        })?;
        setup_from_number(n)
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        self.pipeline.to_pipeline_config()
    }

    pub fn network_config(&self, setup: SetupId) -> CliResult<NetworkConfig> {
        let input_dim = feature_dim(self.pipeline.include_amplitude);
        let network = self.network.to_network_config(input_dim, setup.class_count());
        network
            .validate()
            .map_err(|e| config_error(format!("invalid [network] section: {e}")))?;
        Ok(network)
    }

    pub fn train_config(&self, setup: SetupId, seed_override: Option<u64>) -> CliResult<TrainConfig> {
        let t = &self.trainer;
        let config = TrainConfig {
            setup,
            epochs: t.epochs,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            beta1: t.beta1,
            beta2: t.beta2,
            epsilon: t.epsilon,
            val_fraction: t.val_fraction,
            seed: seed_override.unwrap_or(t.seed),
            split_by_recording: t.split_by_recording,
            weighting: t.weighting,
        };
        config
            .validate()
            .map_err(|e| config_error(format!("invalid [trainer] section: {e}")))?;
        Ok(config)
    }
}

/// `[pipeline]` — windowing and resampling.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineSection {
    pub window_ms: f64,
    pub stride_ms: Option<f64>,
    pub sample_size: usize,
    pub include_amplitude: bool,
}

impl Default for PipelineSection {
    fn default() -> Self {
        let d = PipelineConfig::default();
        Self {
            window_ms: d.window_ms,
            stride_ms: d.stride_ms,
            sample_size: d.sample_size,
            include_amplitude: d.include_amplitude,
        }
    }
}

impl PipelineSection {
    pub fn to_pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            window_ms: self.window_ms,
            stride_ms: self.stride_ms,
            sample_size: self.sample_size,
            include_amplitude: self.include_amplitude,
        }
    }
}

/// `[network]` — architecture sizing.  Per level, the MLP widths apply to
/// every grouping radius of that level.  Defaults are the full-scale
/// reference architecture.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSection {
    pub msg_centers: [usize; 3],
    pub msg_radii: [Vec<f64>; 3],
    pub msg_group_sizes: [Vec<usize>; 3],
    pub msg_mlp_widths: [Vec<usize>; 3],
    pub fp_widths: [Vec<usize>; 3],
    pub fc_hidden: [usize; 2],
    pub dropout: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        let reference = NetworkConfig::reference(3, 2);
        let level = |l: usize| &reference.msg[l];
        Self {
            msg_centers: [level(0).centers, level(1).centers, level(2).centers],
            msg_radii: [
                level(0).radii.clone(),
                level(1).radii.clone(),
                level(2).radii.clone(),
            ],
            msg_group_sizes: [
                level(0).max_group_size.clone(),
                level(1).max_group_size.clone(),
                level(2).max_group_size.clone(),
            ],
            msg_mlp_widths: [
                level(0).mlp_widths[0].clone(),
                level(1).mlp_widths[0].clone(),
                level(2).mlp_widths[0].clone(),
            ],
            fp_widths: [
                reference.fp_widths[0].clone(),
                reference.fp_widths[1].clone(),
                reference.fp_widths[2].clone(),
            ],
            fc_hidden: reference.fc_hidden,
            dropout: reference.dropout,
        }
    }
}

impl NetworkSection {
    pub fn to_network_config(&self, input_dim: usize, classes: usize) -> NetworkConfig {
        let msg = (0..3)
            .map(|l| MsgLevelConfig {
                centers: self.msg_centers[l],
                radii: self.msg_radii[l].clone(),
                max_group_size: self.msg_group_sizes[l].clone(),
                mlp_widths: vec![self.msg_mlp_widths[l].clone(); self.msg_radii[l].len()],
            })
            .collect();
        NetworkConfig {
            input_dim,
            msg,
            fp_widths: self.fp_widths.to_vec(),
            fc_hidden: self.fc_hidden,
            dropout: self.dropout,
            classes,
        }
    }
}

/// `[trainer]` — optimization hyperparameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainerSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub val_fraction: f64,
    pub split_by_recording: bool,
    pub weighting: LossWeighting,
    pub seed: u64,
}

impl Default for TrainerSection {
    fn default() -> Self {
        let d = TrainConfig::new(SetupId::S1, 0);
        Self {
            epochs: d.epochs,
            batch_size: d.batch_size,
            learning_rate: d.learning_rate,
            beta1: d.beta1,
            beta2: d.beta2,
            epsilon: d.epsilon,
            val_fraction: d.val_fraction,
            split_by_recording: d.split_by_recording,
            weighting: d.weighting,
            seed: d.seed,
        }
    }
}

// ---------------------------------------------------------------------------
// Render config
// ---------------------------------------------------------------------------

fn default_window_ms() -> f64 {
    PipelineConfig::default().window_ms
}

/// Config for `render-scene`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    /// Dataset directory, relative to this config file.
    pub dataset_dir: PathBuf,
    /// Recording id (as listed in the dataset manifest).
    pub recording: String,
    /// Window start, milliseconds since recording start.
    #[serde(default)]
    pub window_start_ms: f64,
    /// Window length in milliseconds.
    #[serde(default = "default_window_ms")]
    pub window_ms: f64,
    /// Label setup the checkpoint was trained on; required with
    /// `--checkpoint`, ignored for ground-truth renders.
    #[serde(default)]
    pub setup: Option<u8>,
    /// Must match the training pipeline when rendering predictions.
    #[serde(default)]
    pub pipeline: PipelineSection,
}

impl RenderConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        load_toml(path)
    }

    pub fn dataset_dir_resolved(&self, config_path: &Path) -> PathBuf {
        resolve_relative(config_path, &self.dataset_dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        fs::write(&path, "dataset_dir = \"d\"\nsetupp = 3\n").unwrap();
        let err = match ExperimentConfig::load(&path) {
            Err(crate::util::CliError::Config(e)) => format!("{e:#}"),
            other => panic!("expected config error, got {other:?}"),
        };
        assert!(err.contains("setupp"), "field name missing from: {err}");
        assert!(err.contains("line"), "line info missing from: {err}");
    }

    #[test]
    fn defaults_fill_missing_sections() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("min.toml");
        fs::write(&path, "dataset_dir = \"data\"\nsetup = 3\n").unwrap();
        let config = ExperimentConfig::load(&path).unwrap();
        let setup = config.required_setup(&path).unwrap();
        assert_eq!(setup.number(), 3);
        let network = config.network_config(setup).unwrap();
        assert_eq!(network.classes, 3);
        assert_eq!(network.input_dim, 4);
        let train = config.train_config(setup, Some(9)).unwrap();
        assert_eq!(train.seed, 9);
        assert_eq!(train.epochs, 100);
    }

    #[test]
    fn setup_errors_list_the_valid_range() {
        let err = match setup_from_number(9) {
            Err(crate::util::CliError::Config(e)) => format!("{e}"),
            other => panic!("expected config error, got {other:?}"),
        };
        assert!(err.contains("1, 2, 3, 4, 5, 6"), "{err}");
    }

    #[test]
    fn setup_lists_parse_and_reject_duplicates() {
        let ids: Vec<u8> = parse_setups("1, 3,6").unwrap().iter().map(|s| s.number()).collect();
        assert_eq!(ids, [1, 3, 6]);
        assert!(parse_setups("2,2").is_err());
        assert!(parse_setups("0").is_err());
        assert!(parse_setups("x").is_err());
    }

    #[test]
    fn inner_paths_resolve_against_the_config_file() {
        let config = Path::new("/tmp/cfgs/exp.toml");
        assert_eq!(
            resolve_relative(config, Path::new("../data")),
            Path::new("/tmp/cfgs/../data")
        );
        assert_eq!(resolve_relative(config, Path::new("/abs")), Path::new("/abs"));
    }
}
