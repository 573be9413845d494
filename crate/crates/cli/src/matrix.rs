//! `experiment-matrix` — train and evaluate several setups on one dataset.
//!
//! Every setup trains on the same windows and is scored on the same test
//! split, so the per-setup reports are directly comparable.

use std::path::Path;

use evaluator::{emit_report, format_percent, render_tables, EvalReport};
use pipeline::{build_samples, SetupId};
use pointseg::save_checkpoint;
use trainer::{history_table, run_experiment_matrix, ExperimentResult};

use crate::config::{parse_setups, ExperimentConfig};
use crate::lock::DirLock;
use crate::util::{aligned_table, dataset_hash, write_text, Classify, CliResult};

pub fn run(
    config_path: &Path,
    out: &Path,
    setups_arg: Option<&str>,
    seed: Option<u64>,
    verbose: bool,
) -> CliResult<()> {
    let config = ExperimentConfig::load(config_path)?;
    let setups = match setups_arg {
        Some(list) => parse_setups(list)?,
        None => SetupId::ALL.to_vec(),
    };
    let template = config.network_config(setups[0])?;
    let base_config = config.train_config(setups[0], seed)?;

    let _lock = DirLock::acquire(out)?;

    let dataset_dir = config.dataset_dir_resolved(config_path);
    let samples = build_samples(&dataset_dir, &config.pipeline_config()).or_runtime()?;
    let hash = dataset_hash(&dataset_dir)?;
    if verbose {
        let ids: Vec<String> = setups.iter().map(|s| s.number().to_string()).collect();
        eprintln!(
            "training setups {} on {} train windows, scoring on {} test windows",
            ids.join(", "),
            samples.train.len(),
            samples.test.len()
        );
    }

    let results = run_experiment_matrix(
        &samples.train,
        &samples.test,
        &template,
        &base_config,
        &setups,
        &hash,
    )
    .or_runtime()?;

    for result in &results {
        let dir = out.join(format!("setup{}", result.setup.number()));
        std::fs::create_dir_all(&dir).or_runtime()?;
        let mut network = template.clone();
        network.classes = result.setup.class_count();
        save_checkpoint(
            &dir.join("checkpoint.ckpt"),
            &result.outcome.params,
            &network,
            base_config.seed,
        )
        .or_runtime()?;
        write_text(&dir.join("history.tsv"), &history_table(&result.outcome.history))?;
        write_text(&dir.join("report.tsv"), &emit_report(&result.report))?;
        write_text(&dir.join("report-tables.txt"), &render_tables(&result.report))?;
        if verbose {
            eprintln!("setup {} written to {}", result.setup.number(), dir.display());
        }
    }

    let comparison = comparison_tables(&results);
    write_text(&out.join("comparison.txt"), &comparison)?;
    print!("{comparison}");
    Ok(())
}

/// Cross-setup summary: per-class scores side by side, then the headline
/// numbers per setup.
fn comparison_tables(results: &[ExperimentResult]) -> String {
    let mut rows = vec![vec![
        "setup".to_string(),
        "class".to_string(),
        "precision".to_string(),
        "recall".to_string(),
        "f1".to_string(),
    ]];
    for result in results {
        let report: &EvalReport = &result.report;
        let names = report.class_names();
        for class in 1..names.len() {
            rows.push(vec![
                result.setup.number().to_string(),
                names[class].to_string(),
                format_percent(report.precision(class)),
                format_percent(report.recall(class)),
                format_percent(report.f1(class)),
            ]);
        }
    }
    let per_class = aligned_table(&rows);

    let mut rows = vec![vec![
        "setup".to_string(),
        "points".to_string(),
        "macro_f1".to_string(),
        "object_fp".to_string(),
        "ghost_share".to_string(),
    ]];
    for result in results {
        let report = &result.report;
        let (fp_percent, fp_count) = report.ghost_fp_overall();
        rows.push(vec![
            result.setup.number().to_string(),
            report.point_count().to_string(),
            format_percent(report.macro_f1()),
            fp_count.to_string(),
            format!("{}%", format_percent(fp_percent)),
        ]);
    }
    let headline = aligned_table(&rows);

    format!("per-class scores (percent)\n{per_class}\nsummary\n{headline}")
}
