//! `evaluate` — score a saved checkpoint on a dataset's test split.

use std::path::Path;

use evaluator::{emit_report, render_tables};
use pipeline::{build_samples, feature_dim};
use pointseg::load_checkpoint;
use trainer::evaluate_model;

use crate::config::ExperimentConfig;
use crate::lock::DirLock;
use crate::util::{config_error, dataset_hash, write_text, Classify, CliResult};

pub fn run(
    config_path: &Path,
    checkpoint_path: &Path,
    out: &Path,
    verbose: bool,
) -> CliResult<()> {
    let config = ExperimentConfig::load(config_path)?;
    let setup = config.required_setup(config_path)?;

    let checkpoint = load_checkpoint(checkpoint_path).or_runtime()?;
    if checkpoint.config.classes != setup.class_count() {
        return Err(config_error(format!(
            "checkpoint {} has {} output classes but setup {} needs {}",
            checkpoint_path.display(),
            checkpoint.config.classes,
            setup.number(),
            setup.class_count()
        )));
    }
    let input_dim = feature_dim(config.pipeline.include_amplitude);
    if checkpoint.config.input_dim != input_dim {
        return Err(config_error(format!(
            "checkpoint {} expects {} input channels but the [pipeline] section produces {}",
            checkpoint_path.display(),
            checkpoint.config.input_dim,
            input_dim
        )));
    }

    let _lock = DirLock::acquire(out)?;

    let dataset_dir = config.dataset_dir_resolved(config_path);
    let samples = build_samples(&dataset_dir, &config.pipeline_config()).or_runtime()?;
    if verbose {
        eprintln!(
            "scoring {} test windows from {}",
            samples.test.len(),
            dataset_dir.display()
        );
    }

    let checkpoint_name = checkpoint_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| checkpoint_path.display().to_string());
    let report = evaluate_model(
        &checkpoint.params,
        &checkpoint.config,
        setup,
        &samples.test,
        checkpoint_name,
        dataset_hash(&dataset_dir)?,
    )
    .or_runtime()?;

    let report_path = out.join("report.tsv");
    write_text(&report_path, &emit_report(&report))?;
    let tables = render_tables(&report);
    write_text(&out.join("report-tables.txt"), &tables)?;

    if verbose {
        print!("{tables}");
    } else {
        let (fp_percent, fp_count) = report.ghost_fp_overall();
        println!(
            "setup {}: macro-F1 {:.2} over {} points; {fp_count} object false positives, {fp_percent:.2}% ghost-attributed",
            setup.number(),
            report.macro_f1(),
            report.point_count(),
        );
    }
    println!("report: {}", report_path.display());
    Ok(())
}
