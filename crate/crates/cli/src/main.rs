//! Command-line entry point tying the radar ghost-segmentation pieces
//! together: dataset generation, training, evaluation, the cross-setup
//! experiment grid, and SVG scene dumps for qualitative inspection.

mod config;
mod evaluate;
mod generate;
mod lock;
mod matrix;
mod render;
mod train_cmd;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::util::CliError;

#[derive(Parser)]
#[command(
    name = "ghostseg",
    about = "Simulate multi-path radar data and segment ghost detections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset of labeled radar recordings from a scene config.
    Generate(GenerateArgs),
    /// Train one segmentation model for one label setup.
    Train(TrainArgs),
    /// Evaluate a trained checkpoint on a dataset's test split.
    Evaluate(EvaluateArgs),
    /// Train and evaluate one model per setup and compare them.
    ExperimentMatrix(MatrixArgs),
    /// Draw one time window of a recording as a static SVG scene.
    RenderScene(RenderArgs),
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Dataset recipe (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory the recordings and manifest are written to.
    #[arg(long)]
    out: PathBuf,
    /// Override the recipe's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Print per-recording progress.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Experiment config (TOML) naming the dataset and hyperparameters.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the checkpoint and training history.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's training seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Print per-epoch progress.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Experiment config (TOML) naming the dataset and pipeline settings.
    #[arg(long)]
    config: PathBuf,
    /// Checkpoint file produced by `train` or `experiment-matrix`.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Directory the report files are written to.
    #[arg(long)]
    out: PathBuf,
    /// Print the full score tables instead of a summary line.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
pub struct MatrixArgs {
    /// Experiment config (TOML) naming the dataset and hyperparameters.
    #[arg(long)]
    config: PathBuf,
    /// Directory for per-setup checkpoints, reports and the comparison.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated setup ids to run (default: 1,2,3,4,5,6).
    #[arg(long)]
    setups: Option<String>,
    /// Override the config's training seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Print per-epoch progress.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
pub struct RenderArgs {
    /// Render config (TOML) naming the dataset, recording and window.
    #[arg(long)]
    config: PathBuf,
    /// SVG file to write.
    #[arg(long)]
    out: PathBuf,
    /// Optional checkpoint: color points by prediction and mark mistakes.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Print window statistics.
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate::run(&args.config, &args.out, args.seed, args.verbose),
        Command::Train(args) => train_cmd::run(&args.config, &args.out, args.seed, args.verbose),
        Command::Evaluate(args) => {
            evaluate::run(&args.config, &args.checkpoint, &args.out, args.verbose)
        }
        Command::ExperimentMatrix(args) => {
            matrix::run(&args.config, &args.out, args.setups.as_deref(), args.seed, args.verbose)
        }
        Command::RenderScene(args) => {
            render::run(&args.config, &args.out, args.checkpoint.as_deref(), args.verbose)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(err)) => {
            eprintln!("configuration error: {err:#}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
