//! Error type for training runs.

use evaluator::EvalError;
use pointseg::PointsegError;
use thiserror::Error;

/// Failures while configuring, running or evaluating a training run.
#[derive(Debug, Error)]
pub enum TrainError {
    /// Hyperparameters are out of range or inconsistent with the setup.
    #[error("invalid training config: {0}")]
    InvalidConfig(String),

    /// No samples were provided at all.
    #[error("training requires at least one sample")]
    NoSamples,

    /// Class proportions need every trained class to occur.
    #[error("training data has no points of class {missing} — cannot weight the loss")]
    MissingClasses { missing: String },

    /// The split left one side empty.
    #[error("the {side} partition would be empty with this fraction")]
    EmptyPartition { side: &'static str },

    /// The loss became non-finite; training aborts rather than continuing
    /// with poisoned parameters.
    #[error("training diverged at epoch {epoch}, step {step}: loss is not finite")]
    Diverged { epoch: usize, step: usize },

    /// The network failed mid-step (e.g. non-finite activations).
    #[error("network error at epoch {epoch}, step {step}: {source}")]
    Step {
        epoch: usize,
        step: usize,
        #[source]
        source: PointsegError,
    },

    /// Network construction or use failed outside a training step.
    #[error(transparent)]
    Network(#[from] PointsegError),

    /// Metric computation failed.
    #[error(transparent)]
    Eval(#[from] EvalError),
}
