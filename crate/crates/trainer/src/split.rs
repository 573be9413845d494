//! Validation splitting and class-proportion computation.

use std::collections::BTreeMap;

use multipath_sim::rng_for;
use pipeline::{remap_labels, Sample, SetupId};
use pointseg::ClassProportions;
use rand::seq::SliceRandom;

use crate::error::TrainError;

/// Deterministically partition `count` sample indices into train and
/// validation sets.  The validation size is `round(count * fraction)`; a
/// fraction that empties either side is an error.
pub fn split_train_val(
    count: usize,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), TrainError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(TrainError::InvalidConfig(
            "val_fraction must lie strictly between 0 and 1".into(),
        ));
    }
    let val_count = (count as f64 * fraction).round() as usize;
    if val_count == 0 {
        return Err(TrainError::EmptyPartition { side: "validation" });
    }
    if val_count >= count {
        return Err(TrainError::EmptyPartition { side: "training" });
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(&mut rng_for(seed, "val-split", 0));
    let val = order[..val_count].to_vec();
    let train = order[val_count..].to_vec();
    Ok((train, val))
}

/// Partition per recording: every window of a held-out recording goes to
/// validation.  The fraction applies to recordings, not windows.
pub fn split_train_val_by_recording(
    samples: &[Sample],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), TrainError> {
    let mut by_recording: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, sample) in samples.iter().enumerate() {
        by_recording
            .entry(sample.origin.recording_id.as_str())
            .or_default()
            .push(i);
    }
    let ids: Vec<&str> = by_recording.keys().copied().collect();
    let (train_recs, val_recs) = split_train_val(ids.len(), fraction, seed)?;
    let collect = |recs: Vec<usize>| {
        let mut out: Vec<usize> = recs
            .into_iter()
            .flat_map(|r| by_recording[ids[r]].iter().copied())
            .collect();
        out.sort_unstable();
        out
    };
    Ok((collect(train_recs), collect(val_recs)))
}

/// Fraction of points per trained class over the given samples, computed
/// after label remapping and including the background bucket.  Padded
/// duplicate points count too: the loss sees them, so the weights must.
pub fn compute_proportions<'a>(
    samples: impl IntoIterator<Item = &'a Sample>,
    setup: SetupId,
) -> Result<ClassProportions, TrainError> {
    let classes = setup.class_count();
    let mut counts = vec![0u64; classes];
    let mut total = 0u64;
    for sample in samples {
        for class in remap_labels(&sample.labels, setup) {
            counts[class] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(TrainError::NoSamples);
    }
    let missing: Vec<&str> = setup
        .class_names()
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c == 0)
        .map(|(name, _)| *name)
        .collect();
    if !missing.is_empty() {
        return Err(TrainError::MissingClasses { missing: missing.join(", ") });
    }
    let fractions: Vec<f64> =
        counts.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(ClassProportions::new(fractions)?)
}
