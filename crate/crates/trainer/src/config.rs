//! Training hyperparameters.

use pipeline::SetupId;
use serde::{Deserialize, Serialize};

use crate::error::TrainError;

/// How per-point losses are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossWeighting {
    /// Inverse class-frequency weighting — the default, and what makes
    /// minority classes learnable at radar-level imbalance.
    #[default]
    Balanced,
    /// Plain cross-entropy; kept for ablations against the balanced loss.
    Uniform,
}

/// Hyperparameters for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Which label setup the model is trained on.
    pub setup: SetupId,
    /// Passes over the training windows.
    pub epochs: usize,
    /// Samples per optimizer step.
    pub batch_size: usize,
    /// Adaptive-moment step size.
    pub learning_rate: f64,
    /// First/second moment decay.
    pub beta1: f64,
    pub beta2: f64,
    /// Denominator fuzz.
    pub epsilon: f64,
    /// Share of training samples held out for checkpoint selection.
    pub val_fraction: f64,
    /// Master seed: initialization, shuffling, dropout and the validation
    /// split all derive from it.
    pub seed: u64,
    /// Split validation per recording instead of per window.
    pub split_by_recording: bool,
    /// Loss weighting mode.
    pub weighting: LossWeighting,
}

impl TrainConfig {
    /// Standard hyperparameters: 100 epochs, batch 8, step 1e-3, moment
    /// decay 0.9/0.999, 10% validation split, balanced loss.
    pub fn new(setup: SetupId, seed: u64) -> Self {
        TrainConfig {
            setup,
            epochs: 100,
            batch_size: 8,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            val_fraction: 0.10,
            seed,
            split_by_recording: false,
            weighting: LossWeighting::Balanced,
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 {
            return Err(TrainError::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(TrainError::InvalidConfig("batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(TrainError::InvalidConfig("learning_rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(TrainError::InvalidConfig(
                "moment decays must lie in [0, 1)".into(),
            ));
        }
        if !(self.epsilon > 0.0) {
            return Err(TrainError::InvalidConfig("epsilon must be positive".into()));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(TrainError::InvalidConfig(
                "val_fraction must lie strictly between 0 and 1".into(),
            ));
        }
        Ok(())
    }
}
