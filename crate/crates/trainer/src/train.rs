//! The training loop: batched Adam over point clouds, per-epoch validation,
//! and the experiment matrix that trains one model per setup.

use evaluator::{confusion_matrix, f1, macro_average, EvalAccumulator, EvalReport};
use multipath_sim::{derive_seed, rng_for};
use ndarray::ArrayView1;
use pipeline::{remap_labels, Sample, SetupId};
use pointseg::{
    forward, loss_and_gradients, ClassProportions, DropoutMode, Gradients,
    NetworkConfig, NetworkParams, PointsegError, StepOutput,
};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::config::{LossWeighting, TrainConfig};
use crate::error::TrainError;
use crate::optim::Adam;
use crate::split::{compute_proportions, split_train_val, split_train_val_by_recording};

/// Per-epoch record of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    /// Mean training loss per epoch (over samples, in shuffle order).
    pub train_loss: Vec<f64>,
    /// Validation macro F1 per epoch, background excluded, in percent.
    pub val_macro_f1: Vec<f64>,
    /// Epoch whose parameters were kept (earliest on ties).
    pub best_epoch: usize,
}

/// Everything a finished run hands back to the caller.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the best validation epoch.
    pub params: NetworkParams,
    /// Parameters as of the last epoch, for resuming or inspection.
    pub final_params: NetworkParams,
    pub history: TrainHistory,
    /// Class proportions the loss was weighted with.
    pub proportions: ClassProportions,
    /// The network architecture the parameters belong to.
    pub network: NetworkConfig,
    /// Sample indices used for gradient updates.
    pub train_indices: Vec<usize>,
    /// Sample indices held out for validation.
    pub val_indices: Vec<usize>,
}

/// One row of the experiment matrix: a trained model and its test report.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub setup: SetupId,
    pub outcome: TrainOutcome,
    pub report: EvalReport,
}

/// Render a history as a tab-delimited table, one row per epoch.  Floats
/// use their shortest round-trip form so the table can be diffed exactly.
pub fn history_table(history: &TrainHistory) -> String {
    let mut out = String::from("epoch\ttrain_loss\tval_macro_f1\n");
    for (epoch, (loss, score)) in
        history.train_loss.iter().zip(&history.val_macro_f1).enumerate()
    {
        out.push_str(&format!("{epoch}\t{loss:?}\t{score:?}\n"));
    }
    out.push_str(&format!("best\t{}\n", history.best_epoch));
    out
}

fn argmax_row(row: ArrayView1<'_, f64>) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

fn check_inputs(
    samples: &[Sample],
    network: &NetworkConfig,
    config: &TrainConfig,
) -> Result<(), TrainError> {
    config.validate()?;
    network.validate()?;
    if samples.is_empty() {
        return Err(TrainError::NoSamples);
    }
    if network.classes != config.setup.class_count() {
        return Err(TrainError::InvalidConfig(format!(
            "network has {} output classes but {} trains {}",
            network.classes,
            config.setup,
            config.setup.class_count()
        )));
    }
    let points = samples[0].positions.nrows();
    for sample in samples {
        if sample.features.ncols() != network.input_dim {
            return Err(TrainError::InvalidConfig(format!(
                "sample has {} feature channels but the network expects {}",
                sample.features.ncols(),
                network.input_dim
            )));
        }
        if sample.positions.nrows() != points {
            return Err(TrainError::InvalidConfig(format!(
                "samples disagree on point count ({} vs {})",
                sample.positions.nrows(),
                points
            )));
        }
    }
    Ok(())
}

fn loss_proportions(
    samples: &[Sample],
    train_indices: &[usize],
    config: &TrainConfig,
) -> Result<ClassProportions, TrainError> {
    match config.weighting {
        LossWeighting::Balanced => compute_proportions(
            train_indices.iter().map(|&i| &samples[i]),
            config.setup,
        ),
        // Equal proportions make every class weight 1/(c * 1/c) = 1, i.e.
        // plain unweighted cross-entropy.
        LossWeighting::Uniform => {
            let classes = config.setup.class_count();
            Ok(ClassProportions::new(vec![1.0 / classes as f64; classes])?)
        }
    }
}

/// Freshly initialized parameters — the exact starting point [`train`]
/// uses for the given config.
pub fn initial_params(
    network: &NetworkConfig,
    config: &TrainConfig,
) -> Result<NetworkParams, TrainError> {
    Ok(NetworkParams::init(network, derive_seed(config.seed, "init", 0))?)
}

/// Train with freshly initialized parameters (seed derived from the config
/// seed, so a config fully determines the run).
pub fn train(
    samples: &[Sample],
    network: &NetworkConfig,
    config: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    let initial = initial_params(network, config)?;
    train_with_init(samples, network, config, initial)
}

/// Train starting from the given parameters.
///
/// Each epoch shuffles the training indices, walks them in batches, and
/// applies one Adam step per batch on the mean of the per-sample gradients.
/// Dropout noise is drawn from a generator derived per (epoch, position), so
/// results do not depend on how batches are spread across threads.  After
/// each epoch the model is scored on the held-out windows; the parameters
/// with the highest validation macro F1 (background excluded) are returned,
/// keeping the earliest epoch on exact ties.
pub fn train_with_init(
    samples: &[Sample],
    network: &NetworkConfig,
    config: &TrainConfig,
    initial: NetworkParams,
) -> Result<TrainOutcome, TrainError> {
    train_observed(samples, network, config, initial, &mut |_, _, _| {})
}

/// [`train_with_init`] with a progress callback, called once per finished
/// epoch with `(epoch, train_loss, val_macro_f1)`.  The callback only
/// observes; results are identical with or without it.
pub fn train_observed(
    samples: &[Sample],
    network: &NetworkConfig,
    config: &TrainConfig,
    initial: NetworkParams,
    on_epoch: &mut dyn FnMut(usize, f64, f64),
) -> Result<TrainOutcome, TrainError> {
    check_inputs(samples, network, config)?;
    let (train_indices, val_indices) = if config.split_by_recording {
        split_train_val_by_recording(samples, config.val_fraction, config.seed)?
    } else {
        split_train_val(samples.len(), config.val_fraction, config.seed)?
    };
    let proportions = loss_proportions(samples, &train_indices, config)?;

    let mut params = initial;
    let mut flat = params.flatten();
    let mut adam = Adam::new(
        flat.len(),
        config.learning_rate,
        config.beta1,
        config.beta2,
        config.epsilon,
    );
    let mut history = TrainHistory {
        train_loss: Vec::with_capacity(config.epochs),
        val_macro_f1: Vec::with_capacity(config.epochs),
        best_epoch: 0,
    };
    let mut best_score = f64::NEG_INFINITY;
    let mut best_params = params.clone();

    for epoch in 0..config.epochs {
        let mut order = train_indices.clone();
        order.shuffle(&mut rng_for(config.seed, "shuffle", epoch as u64));
        let epoch_seed = derive_seed(config.seed, "dropout", epoch as u64);
        let mut loss_sum = 0.0;

        for (step, batch) in order.chunks(config.batch_size).enumerate() {
            let base = step * config.batch_size;
            let results: Vec<Result<StepOutput, PointsegError>> = batch
                .par_iter()
                .enumerate()
                .map(|(offset, &index)| {
                    let sample = &samples[index];
                    let labels = remap_labels(&sample.labels, config.setup);
                    let mut rng =
                        rng_for(epoch_seed, "sample", (base + offset) as u64);
                    loss_and_gradients(
                        sample.positions.view(),
                        sample.features.view(),
                        &labels,
                        &proportions,
                        &params,
                        network,
                        DropoutMode::Enabled(&mut rng),
                    )
                })
                .collect();

            let mut total = Gradients::zeros_like(&params);
            for result in results {
                let output = result.map_err(|source| match source {
                    PointsegError::NonFinite { .. } => {
                        TrainError::Diverged { epoch, step }
                    }
                    other => TrainError::Step { epoch, step, source: other },
                })?;
                if !output.loss.is_finite() {
                    return Err(TrainError::Diverged { epoch, step });
                }
                loss_sum += output.loss;
                total.accumulate(&output.gradients);
            }
            total.scale(1.0 / batch.len() as f64);
            adam.step(&mut flat, &total.flatten());
            params.assign_from_flat(&flat)?;
            if params.first_non_finite().is_some() {
                return Err(TrainError::Diverged { epoch, step });
            }
        }

        let train_loss = loss_sum / order.len() as f64;
        let val_score = validation_score(
            &params,
            network,
            config.setup,
            val_indices.iter().map(|&i| &samples[i]),
        )?;
        history.train_loss.push(train_loss);
        history.val_macro_f1.push(val_score);
        if val_score > best_score {
            best_score = val_score;
            best_params = params.clone();
            history.best_epoch = epoch;
        }
        on_epoch(epoch, train_loss, val_score);
    }

    Ok(TrainOutcome {
        params: best_params,
        final_params: params,
        history,
        proportions,
        network: network.clone(),
        train_indices,
        val_indices,
    })
}

/// Macro F1 over the setup's trained classes, background excluded, in
/// percent.  Padded duplicate points are skipped; argmax ties resolve to the
/// lowest class index.
pub fn validation_score<'a>(
    params: &NetworkParams,
    network: &NetworkConfig,
    setup: SetupId,
    samples: impl IntoIterator<Item = &'a Sample>,
) -> Result<f64, TrainError> {
    let classes = setup.class_count();
    let mut truth = Vec::new();
    let mut predictions = Vec::new();
    for sample in samples {
        let probs = forward(
            sample.positions.view(),
            sample.features.view(),
            params,
            network,
            DropoutMode::Disabled,
        )?;
        let labels = remap_labels(&sample.labels, setup);
        for (i, row) in probs.rows().into_iter().enumerate() {
            if sample.duplicate_mask[i] {
                continue;
            }
            truth.push(labels[i]);
            predictions.push(argmax_row(row));
        }
    }
    let matrix = confusion_matrix(&truth, &predictions, classes)?;
    let scores: Vec<f64> = (1..classes).map(|c| f1(matrix.view(), c)).collect();
    Ok(macro_average(&scores)?)
}

/// Run the model over a test split and build the evaluation report.
pub fn evaluate_model<'a>(
    params: &NetworkParams,
    network: &NetworkConfig,
    setup: SetupId,
    samples: impl IntoIterator<Item = &'a Sample>,
    checkpoint: impl Into<String>,
    dataset_hash: impl Into<String>,
) -> Result<EvalReport, TrainError> {
    let mut accumulator = EvalAccumulator::new(setup);
    for sample in samples {
        let probs = forward(
            sample.positions.view(),
            sample.features.view(),
            params,
            network,
            DropoutMode::Disabled,
        )?;
        let predictions: Vec<usize> =
            probs.rows().into_iter().map(argmax_row).collect();
        accumulator.add_points(&sample.labels, &predictions, &sample.duplicate_mask)?;
    }
    Ok(accumulator.finish(checkpoint, dataset_hash))
}

/// Train one model per setup on the same samples and evaluate each on the
/// test split.  The network template's class count is adjusted per setup;
/// everything else (seed included) is shared, so setups differ only in how
/// labels are grouped.
pub fn run_experiment_matrix(
    train_samples: &[Sample],
    test_samples: &[Sample],
    network_template: &NetworkConfig,
    base_config: &TrainConfig,
    setups: &[SetupId],
    dataset_hash: &str,
) -> Result<Vec<ExperimentResult>, TrainError> {
    let mut results = Vec::with_capacity(setups.len());
    for &setup in setups {
        let mut config = base_config.clone();
        config.setup = setup;
        let mut network = network_template.clone();
        network.classes = setup.class_count();
        let outcome = train(train_samples, &network, &config)?;
        let checkpoint = format!("setup{}-seed{}", setup.number(), config.seed);
        let report = evaluate_model(
            &outcome.params,
            &network,
            setup,
            test_samples,
            checkpoint,
            dataset_hash,
        )?;
        results.push(ExperimentResult { setup, outcome, report });
    }
    Ok(results)
}
