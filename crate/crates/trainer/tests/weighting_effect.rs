//! Class-balanced loss weighting versus plain cross-entropy on imbalanced
//! data.  With a ~5% minority class, the balanced loss should recover more
//! minority points than the unweighted one under the same training budget.

use ndarray::Array2;
use pipeline::{Sample, SampleOrigin, SetupId};
use pointseg::{MsgLevelConfig, NetworkConfig};
use radar_core::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trainer::{evaluate_model, train, LossWeighting, TrainConfig};

fn small_network() -> NetworkConfig {
    NetworkConfig {
        input_dim: 3,
        msg: vec![
            MsgLevelConfig {
                centers: 16,
                radii: vec![1.5, 3.0],
                max_group_size: vec![8, 16],
                mlp_widths: vec![vec![8, 8], vec![8, 8]],
            },
            MsgLevelConfig {
                centers: 8,
                radii: vec![3.0, 6.0],
                max_group_size: vec![8, 16],
                mlp_widths: vec![vec![12, 12], vec![12, 12]],
            },
            MsgLevelConfig {
                centers: 4,
                radii: vec![6.0, 12.0],
                max_group_size: vec![8, 16],
                mlp_widths: vec![vec![12, 16], vec![12, 16]],
            },
        ],
        fp_widths: vec![vec![16, 16], vec![16, 12], vec![12, 12]],
        fc_hidden: [12, 12],
        dropout: 0.0,
        classes: 2,
    }
}

/// 64 points: 62 background scattered over a 10 m square, 2 object points in
/// a loose cluster whose position and Doppler ranges sit entirely inside the
/// clutter's.  Locally the object share stays below one half, so plain
/// cross-entropy prefers calling everything background; the balanced loss
/// moves that threshold and should recover the cluster anyway.
fn imbalanced_sample(seed: u64, id: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(id));
    let mut rows: Vec<([f64; 2], f64, Label)> = Vec::new();
    for _ in 0..62 {
        let x = rng.random_range(0.0..10.0);
        let y = rng.random_range(0.0..10.0);
        let v = rng.random_range(-0.6..0.6);
        rows.push(([x, y], v, Label::Background));
    }
    let cx = rng.random_range(4.0..8.0);
    let cy = rng.random_range(4.0..8.0);
    for _ in 0..2 {
        let x = cx + rng.random_range(-1.6..1.6);
        let y = cy + rng.random_range(-1.6..1.6);
        let v = rng.random_range(-0.3..0.5);
        rows.push(([x, y], v, Label::Pedestrian));
    }
    let n = rows.len();
    Sample {
        positions: Array2::from_shape_fn((n, 2), |(i, j)| rows[i].0[j]),
        features: Array2::from_shape_fn((n, 3), |(i, j)| match j {
            0 => rows[i].0[0] / 10.0,
            1 => rows[i].0[1] / 10.0,
            _ => rows[i].1,
        }),
        labels: rows.iter().map(|r| r.2).collect(),
        duplicate_mask: vec![false; n],
        origin: SampleOrigin {
            recording_id: format!("rec{id}"),
            window_start_ms: 0.0,
        },
    }
}

fn sample_set(seed: u64, count: u64) -> Vec<Sample> {
    (0..count).map(|id| imbalanced_sample(seed, id)).collect()
}

fn object_recall(weighting: LossWeighting, seed: u64) -> f64 {
    let train_samples = sample_set(seed, 12);
    let test_samples = sample_set(seed + 1000, 6);
    let network = small_network();
    let mut config = TrainConfig::new(SetupId::S1, seed);
    config.epochs = 25;
    config.batch_size = 4;
    config.weighting = weighting;
    let outcome = train(&train_samples, &network, &config).expect("training succeeds");
    // Compare the models the two losses actually converge to, not the
    // validation-selected snapshots: with two object points per validation
    // window, an early over-predicting epoch can win the checkpoint race in
    // either arm and mask the effect under test.
    let report = evaluate_model(
        &outcome.final_params,
        &network,
        SetupId::S1,
        &test_samples,
        "weighting-test",
        "synthetic",
    )
    .expect("evaluation succeeds");
    report.recall(1)
}

#[test]
fn balanced_weighting_lifts_minority_recall() {
    let mut wins = 0;
    let mut lines = Vec::new();
    for seed in [1u64, 2, 3] {
        let balanced = object_recall(LossWeighting::Balanced, seed);
        let uniform = object_recall(LossWeighting::Uniform, seed);
        lines.push(format!(
            "seed {seed}: balanced recall {balanced:.2}%, uniform recall {uniform:.2}%"
        ));
        if balanced > uniform {
            wins += 1;
        }
    }
    let summary = lines.join("\n");
    eprintln!("{summary}");
    assert!(
        wins >= 2,
        "balanced weighting should win on at least 2 of 3 seeds\n{summary}"
    );
}
