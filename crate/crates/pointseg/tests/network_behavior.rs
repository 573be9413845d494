//! Structural properties of the full network: permutation behavior,
//! checkpoint fidelity under a real forward pass, and training-mode
//! reproducibility.

use ndarray::Array2;
use pointseg::{
    forward, load_checkpoint, save_checkpoint, DropoutMode, MsgLevelConfig,
    NetworkConfig, NetworkParams,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tiny_config() -> NetworkConfig {
    NetworkConfig {
        input_dim: 4,
        msg: vec![
            MsgLevelConfig {
                centers: 8,
                radii: vec![0.5, 1.0],
                max_group_size: vec![4, 8],
                mlp_widths: vec![vec![4, 4], vec![4, 4]],
            },
            MsgLevelConfig {
                centers: 4,
                radii: vec![1.0, 2.0],
                max_group_size: vec![4, 8],
                mlp_widths: vec![vec![6, 6], vec![6, 6]],
            },
            MsgLevelConfig {
                centers: 2,
                radii: vec![2.0, 4.0],
                max_group_size: vec![4, 8],
                mlp_widths: vec![vec![6, 8], vec![6, 8]],
            },
        ],
        fp_widths: vec![vec![8, 8], vec![8, 6], vec![6, 6]],
        fc_hidden: [6, 6],
        dropout: 0.5,
        classes: 3,
    }
}

/// Reordering the input points must reorder the per-point outputs and
/// change nothing else.  Holds whenever pairwise distances and salience
/// values are unique, which a continuous random cloud gives almost surely.
#[test]
fn outputs_follow_point_permutations() {
    let config = tiny_config();
    let params = NetworkParams::init(&config, 21).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let n = 24;
    let positions = Array2::from_shape_fn((n, 2), |_| rng.random_range(-4.0..4.0));
    let features = Array2::from_shape_fn((n, 4), |_| rng.random_range(-1.5..1.5));

    let base = forward(
        positions.view(),
        features.view(),
        &params,
        &config,
        DropoutMode::Disabled,
    )
    .unwrap();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let perm_pos = positions.select(ndarray::Axis(0), &order);
    let perm_feat = features.select(ndarray::Axis(0), &order);
    let permuted = forward(
        perm_pos.view(),
        perm_feat.view(),
        &params,
        &config,
        DropoutMode::Disabled,
    )
    .unwrap();

    for (j, &orig) in order.iter().enumerate() {
        for c in 0..config.classes {
            let diff = (permuted[[j, c]] - base[[orig, c]]).abs();
            assert!(
                diff < 1e-9,
                "row {j} (original {orig}), class {c}: diff {diff:.3e}"
            );
        }
    }
}

/// A checkpoint loaded from disk must reproduce the exact probabilities of
/// the network that saved it.
#[test]
fn checkpoints_preserve_predictions_exactly() {
    let config = tiny_config();
    let params = NetworkParams::init(&config, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let positions = Array2::from_shape_fn((16, 2), |_| rng.random_range(-4.0..4.0));
    let features = Array2::from_shape_fn((16, 4), |_| rng.random_range(-1.5..1.5));

    let before = forward(
        positions.view(),
        features.view(),
        &params,
        &config,
        DropoutMode::Disabled,
    )
    .unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.ckpt");
    save_checkpoint(&path, &params, &config, 4).unwrap();
    let loaded = load_checkpoint(&path).unwrap();

    let after = forward(
        positions.view(),
        features.view(),
        &loaded.params,
        &loaded.config,
        DropoutMode::Disabled,
    )
    .unwrap();
    assert_eq!(before, after);
}

/// Two training-mode passes with identically seeded RNGs draw identical
/// dropout masks, so they must agree bit for bit.
#[test]
fn training_mode_is_reproducible_given_the_seed() {
    let config = tiny_config();
    let params = NetworkParams::init(&config, 6).unwrap();
    let mut data_rng = ChaCha8Rng::seed_from_u64(17);
    let positions =
        Array2::from_shape_fn((20, 2), |_| data_rng.random_range(-4.0..4.0));
    let features =
        Array2::from_shape_fn((20, 4), |_| data_rng.random_range(-1.5..1.5));

    let mut rng_a = ChaCha8Rng::seed_from_u64(900);
    let a = forward(
        positions.view(),
        features.view(),
        &params,
        &config,
        DropoutMode::Enabled(&mut rng_a),
    )
    .unwrap();
    let mut rng_b = ChaCha8Rng::seed_from_u64(900);
    let b = forward(
        positions.view(),
        features.view(),
        &params,
        &config,
        DropoutMode::Enabled(&mut rng_b),
    )
    .unwrap();
    assert_eq!(a, b);
}
