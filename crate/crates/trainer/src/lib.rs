//! Training for radar point segmentation: deterministic data splitting,
//! class-balanced loss weighting, a batched Adam loop with per-epoch
//! validation, and the experiment matrix that trains one model per label
//! setup and evaluates each on a held-out test split.
//!
//! Runs are reproducible end to end: the config seed determines parameter
//! initialization, the train/validation split, epoch shuffles and dropout
//! noise, and dropout draws are keyed by sample position rather than thread
//! schedule, so the same config and samples always yield the same model.

pub mod config;
pub mod error;
pub mod optim;
pub mod split;
pub mod train;

pub use config::{LossWeighting, TrainConfig};
pub use error::TrainError;
pub use optim::Adam;
pub use split::{compute_proportions, split_train_val, split_train_val_by_recording};
pub use train::{
    evaluate_model, history_table, initial_params, run_experiment_matrix, train,
    train_observed, train_with_init, validation_score, ExperimentResult, TrainHistory,
    TrainOutcome,
};
