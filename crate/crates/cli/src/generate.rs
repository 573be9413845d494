//! `generate` — synthesize a dataset from a scenario config.

use std::collections::BTreeMap;
use std::path::Path;

use multipath_sim::{build_dataset, DatasetConfig, DatasetMetadata, Split};
use radar_core::Label;

use crate::config::load_toml;
use crate::lock::DirLock;
use crate::util::{aligned_table, CliResult, Classify};

pub fn run(config_path: &Path, out: &Path, seed: Option<u64>, verbose: bool) -> CliResult<()> {
    let mut config: DatasetConfig = load_toml(config_path)?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    config.validate().or_config()?;

    let _lock = DirLock::acquire(out)?;
    let metadata = build_dataset(&config, out).or_runtime()?;

    if verbose {
        for rec in &metadata.recordings {
            eprintln!(
                "wrote {} ({}, {:?}, {} frames, {} points)",
                rec.id, rec.scenario, rec.split, rec.frames, rec.points
            );
        }
    }

    println!(
        "dataset written to {} (seed {}, {} recordings)",
        out.display(),
        metadata.master_seed,
        metadata.recordings.len()
    );
    println!();
    print!("{}", label_table(&metadata));
    Ok(())
}

/// Per-label point counts, split into train/test columns.
fn label_table(metadata: &DatasetMetadata) -> String {
    let mut train_counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut test_counts: BTreeMap<&str, u64> = BTreeMap::new();
    for rec in &metadata.recordings {
        let bucket = match rec.split {
            Split::Train => &mut train_counts,
            Split::Test => &mut test_counts,
        };
        for (name, count) in &rec.label_counts {
            *bucket.entry(name.as_str()).or_default() += count;
        }
    }

    let mut rows = vec![vec![
        "label".to_string(),
        "train".to_string(),
        "test".to_string(),
        "total".to_string(),
    ]];
    let mut sums = [0u64; 3];
    for label in Label::ALL {
        let name = label.name();
        let train = train_counts.get(name).copied().unwrap_or(0);
        let test = test_counts.get(name).copied().unwrap_or(0);
        let total = metadata.label_totals.get(name).copied().unwrap_or(0);
        sums[0] += train;
        sums[1] += test;
        sums[2] += total;
        rows.push(vec![
            name.to_string(),
            train.to_string(),
            test.to_string(),
            total.to_string(),
        ]);
    }
    rows.push(vec![
        "total".to_string(),
        sums[0].to_string(),
        sums[1].to_string(),
        sums[2].to_string(),
    ]);
    aligned_table(&rows)
}
