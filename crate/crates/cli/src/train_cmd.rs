//! `train` — fit a model on one setup and save the selected checkpoint.

use std::path::Path;

use pipeline::build_samples;
use pointseg::save_checkpoint;
use trainer::{history_table, initial_params, train_observed};

use crate::config::ExperimentConfig;
use crate::lock::DirLock;
use crate::util::{write_text, Classify, CliResult};

pub fn run(config_path: &Path, out: &Path, seed: Option<u64>, verbose: bool) -> CliResult<()> {
    let config = ExperimentConfig::load(config_path)?;
    let setup = config.required_setup(config_path)?;
    let network = config.network_config(setup)?;
    let train_config = config.train_config(setup, seed)?;

    let _lock = DirLock::acquire(out)?;

    let dataset_dir = config.dataset_dir_resolved(config_path);
    let samples = build_samples(&dataset_dir, &config.pipeline_config()).or_runtime()?;
    if verbose {
        eprintln!(
            "loaded {} train / {} test windows from {}",
            samples.train.len(),
            samples.test.len(),
            dataset_dir.display()
        );
    }

    let initial = initial_params(&network, &train_config).or_runtime()?;
    let mut on_epoch = |epoch: usize, loss: f64, score: f64| {
        if verbose {
            eprintln!("epoch {epoch}: train loss {loss:.6}, val macro-F1 {score:.2}");
        }
    };
    let outcome = train_observed(&samples.train, &network, &train_config, initial, &mut on_epoch)
        .or_runtime()?;

    let checkpoint_path = out.join("checkpoint.ckpt");
    save_checkpoint(&checkpoint_path, &outcome.params, &network, train_config.seed)
        .or_runtime()?;
    let history_path = out.join("history.tsv");
    write_text(&history_path, &history_table(&outcome.history))?;

    println!(
        "best epoch {} of {} (val macro-F1 {:.2})",
        outcome.history.best_epoch,
        train_config.epochs,
        outcome.history.val_macro_f1[outcome.history.best_epoch]
    );
    println!("checkpoint: {}", checkpoint_path.display());
    println!("history:    {}", history_path.display());
    Ok(())
}
