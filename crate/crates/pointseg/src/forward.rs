//! Forward and backward passes of the segmentation network.
//!
//! The encoder runs three multi-scale grouping levels (farthest point
//! sampling, per-radius ball query, shared MLP, channel-wise max-pool,
//! concatenation over radii).  The decoder propagates features back onto the
//! full cloud through inverse-distance interpolation plus skip connections,
//! and a small per-point head produces class probabilities.
//!
//! Gradients are computed analytically.  Point coordinates act as constants:
//! no gradient flows through sampling, grouping or interpolation *indices*,
//! only through the feature values they route — max-pool gradients follow
//! the cached argmax, interpolation gradients follow the cached weights.

use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::NetworkConfig;
use crate::error::PointsegError;
use crate::loss::{softmax, weighted_ce_loss, ClassProportions};
use crate::params::{layer_specs, Gradients, Layer, NetworkParams};
use crate::sampling::{ball_query, farthest_point_sampling};

/// Distance floor for inverse-distance interpolation weights.
pub const INTERP_FLOOR: f64 = 1e-10;

/// Whether dropout layers are active.  Training passes a seeded RNG; during
/// evaluation dropout is the identity.
pub enum DropoutMode<'a> {
    Disabled,
    Enabled(&'a mut ChaCha8Rng),
}

/// Result of one supervised step on a single cloud.
pub struct StepOutput {
    /// Mean weighted cross-entropy over the cloud's points.
    pub loss: f64,
    /// Per-point class probabilities, one row per input point.
    pub probs: Array2<f64>,
    /// Gradients for every parameter, aligned with the parameter layout.
    pub gradients: Gradients,
}

// ---------------------------------------------------------------------------
// Parameter layout bookkeeping
// ---------------------------------------------------------------------------

/// Indices into `params.layers` for each architectural slot.
struct Layout {
    msg: Vec<Vec<Vec<usize>>>,
    fp: Vec<Vec<usize>>,
    fc: Vec<usize>,
}

fn check_params(
    params: &NetworkParams,
    config: &NetworkConfig,
) -> Result<Layout, PointsegError> {
    let specs = layer_specs(config);
    if specs.len() != params.layers.len() {
        return Err(PointsegError::ShapeMismatch(format!(
            "config describes {} layers, parameters hold {}",
            specs.len(),
            params.layers.len()
        )));
    }
    for (spec, layer) in specs.iter().zip(&params.layers) {
        if spec.path != layer.path
            || layer.weight.nrows() != spec.rows
            || layer.weight.ncols() != spec.cols
            || layer.bias.len() != spec.cols
        {
            return Err(PointsegError::ShapeMismatch(format!(
                "layer {} does not match the config's expected shape",
                layer.path
            )));
        }
    }

    let mut idx = 0;
    let mut next = |count: usize| {
        let range: Vec<usize> = (idx..idx + count).collect();
        idx += count;
        range
    };
    let msg = config
        .msg
        .iter()
        .map(|level| {
            level.mlp_widths.iter().map(|w| next(w.len())).collect()
        })
        .collect();
    let fp = config.fp_widths.iter().map(|w| next(w.len())).collect();
    let fc = next(3);
    Ok(Layout { msg, fp, fc })
}

// ---------------------------------------------------------------------------
// Shared affine helpers
// ---------------------------------------------------------------------------

/// Input and post-activation output of one affine layer application.
struct LinearIo {
    input: Array2<f64>,
    output: Array2<f64>,
}

fn affine(
    input: Array2<f64>,
    layer: &Layer,
    relu: bool,
) -> Result<LinearIo, PointsegError> {
    let mut output = input.dot(&layer.weight) + &layer.bias;
    if relu {
        output.mapv_inplace(|v| v.max(0.0));
    }
    if !output.iter().all(|v| v.is_finite()) {
        return Err(PointsegError::NonFinite { layer: layer.path.clone() });
    }
    Ok(LinearIo { input, output })
}

/// Backward through one affine (+ optional ReLU) layer.  Accumulates weight
/// and bias gradients into `slot` and returns the gradient w.r.t. the input.
fn affine_backward(
    io: &LinearIo,
    layer: &Layer,
    mut grad: Array2<f64>,
    relu: bool,
    slot: &mut (Array2<f64>, Array1<f64>),
) -> Array2<f64> {
    if relu {
        grad.zip_mut_with(&io.output, |g, &o| {
            if o <= 0.0 {
                *g = 0.0;
            }
        });
    }
    slot.0 += &io.input.t().dot(&grad);
    slot.1 += &grad.sum_axis(Axis(0));
    grad.dot(&layer.weight.t())
}

// ---------------------------------------------------------------------------
// Reference operations (also used by tests)
// ---------------------------------------------------------------------------

/// Digest one neighborhood into a single feature vector: recenter the first
/// two columns on `center`, push every row through the shared ReLU MLP, then
/// max-pool each channel over the rows.  An empty layer list degenerates to
/// max-pooling the recentered rows themselves.
pub fn mini_pointnet(
    group: ArrayView2<'_, f64>,
    center: (f64, f64),
    layers: &[&Layer],
) -> Result<Array1<f64>, PointsegError> {
    if group.nrows() == 0 || group.ncols() < 2 {
        return Err(PointsegError::ShapeMismatch(
            "mini_pointnet needs at least one row and two coordinate columns".into(),
        ));
    }
    let mut rows = group.to_owned();
    for mut row in rows.rows_mut() {
        row[0] -= center.0;
        row[1] -= center.1;
    }
    let mut current = rows;
    for layer in layers {
        current = affine(current, layer, true)?.output;
    }
    let pooled = Array1::from_shape_fn(current.ncols(), |ch| {
        current.column(ch).iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    });
    Ok(pooled)
}

/// Inverse-distance interpolation of coarse features onto fine positions.
///
/// Each fine point takes its three nearest coarse points (fewer if the
/// coarse set is smaller); weights are `1 / max(distance, 1e-10)`,
/// normalized to sum to one, so a fine point sitting on a coarse point
/// copies that point's features.
pub fn interpolate_features(
    fine_positions: ArrayView2<'_, f64>,
    coarse_positions: ArrayView2<'_, f64>,
    coarse_features: ArrayView2<'_, f64>,
) -> Result<Array2<f64>, PointsegError> {
    if coarse_positions.nrows() == 0 {
        return Err(PointsegError::ShapeMismatch(
            "cannot interpolate from an empty coarse set".into(),
        ));
    }
    if coarse_positions.nrows() != coarse_features.nrows() {
        return Err(PointsegError::ShapeMismatch(
            "coarse positions and features disagree on point count".into(),
        ));
    }
    let neighbors = interp_neighbors(fine_positions, coarse_positions);
    Ok(apply_interp(&neighbors, coarse_features, fine_positions.nrows()))
}

fn interp_neighbors(
    fine: ArrayView2<'_, f64>,
    coarse: ArrayView2<'_, f64>,
) -> Vec<Vec<(usize, f64)>> {
    let take = coarse.nrows().min(3);
    (0..fine.nrows())
        .map(|i| {
            let mut dists: Vec<(f64, usize)> = (0..coarse.nrows())
                .map(|j| {
                    let dx = fine[[i, 0]] - coarse[[j, 0]];
                    let dy = fine[[i, 1]] - coarse[[j, 1]];
                    (dx * dx + dy * dy, j)
                })
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let raw: Vec<(usize, f64)> = dists[..take]
                .iter()
                .map(|&(d2, j)| (j, 1.0 / d2.sqrt().max(INTERP_FLOOR)))
                .collect();
            let total: f64 = raw.iter().map(|(_, w)| w).sum();
            raw.into_iter().map(|(j, w)| (j, w / total)).collect()
        })
        .collect()
}

fn apply_interp(
    neighbors: &[Vec<(usize, f64)>],
    coarse_features: ArrayView2<'_, f64>,
    fine_count: usize,
) -> Array2<f64> {
    let width = coarse_features.ncols();
    let mut out = Array2::zeros((fine_count, width));
    for (i, nbrs) in neighbors.iter().enumerate() {
        for &(j, w) in nbrs {
            for ch in 0..width {
                out[[i, ch]] += w * coarse_features[[j, ch]];
            }
        }
    }
    out
}

fn dropout_mask(rows: usize, cols: usize, rate: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let keep_scale = 1.0 / (1.0 - rate);
    Array2::from_shape_fn((rows, cols), |_| {
        if rng.random::<f64>() < rate {
            0.0
        } else {
            keep_scale
        }
    })
}

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

struct MsgRadiusCache {
    groups: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    io: Vec<LinearIo>,
    /// Flat row index of the channel-wise maximum, per (center, channel).
    argmax: Array2<usize>,
}

struct MsgLevelCache {
    input_points: usize,
    input_width: usize,
    radii: Vec<MsgRadiusCache>,
}

struct FpCache {
    neighbors: Vec<Vec<(usize, f64)>>,
    coarse_count: usize,
    carry_width: usize,
    io: Vec<LinearIo>,
}

struct FcCache {
    io: Vec<LinearIo>,
    masks: [Option<Array2<f64>>; 2],
}

struct ForwardCache {
    msg: Vec<MsgLevelCache>,
    fp: Vec<FpCache>,
    fc: FcCache,
}

/// Index of the point that seeds farthest point sampling.
///
/// Clouds with four or more feature channels treat the last channel as point
/// salience (amplitude in the radar pipeline) and start from its argmax, so
/// the strongest return is always kept as a center.  Narrower feature rows
/// fall back to index 0.  Ties break to the lowest index.
fn sampling_start(features: ArrayView2<'_, f64>) -> usize {
    if features.ncols() < 4 {
        return 0;
    }
    let salience = features.column(features.ncols() - 1);
    let mut best = 0;
    for (i, &v) in salience.iter().enumerate() {
        if v > salience[best] {
            best = i;
        }
    }
    best
}

fn run_forward(
    positions: ArrayView2<'_, f64>,
    features: ArrayView2<'_, f64>,
    params: &NetworkParams,
    config: &NetworkConfig,
    layout: &Layout,
    mut dropout: DropoutMode<'_>,
) -> Result<(Array2<f64>, ForwardCache), PointsegError> {
    let n = positions.nrows();
    if n == 0 {
        return Err(PointsegError::ShapeMismatch("empty point cloud".into()));
    }
    if positions.ncols() != 2 {
        return Err(PointsegError::ShapeMismatch(format!(
            "positions must have 2 columns, got {}",
            positions.ncols()
        )));
    }
    if features.nrows() != n {
        return Err(PointsegError::ShapeMismatch(format!(
            "{n} positions but {} feature rows",
            features.nrows()
        )));
    }
    if features.ncols() != config.input_dim {
        return Err(PointsegError::ShapeMismatch(format!(
            "feature width {} does not match configured input_dim {}",
            features.ncols(),
            config.input_dim
        )));
    }

    // --- Encoder ---------------------------------------------------------
    // `levels[l]` holds (positions, features) of level l; level 0 is the
    // input cloud, level 3 the coarsest centers.
    let mut levels: Vec<(Array2<f64>, Array2<f64>)> =
        vec![(positions.to_owned(), features.to_owned())];
    let mut msg_caches = Vec::with_capacity(3);

    for (l, level_cfg) in config.msg.iter().enumerate() {
        let (pos, feat) = {
            let (p, f) = &levels[l];
            (p.clone(), f.clone())
        };
        let start = if l == 0 { sampling_start(features) } else { 0 };
        let picked = farthest_point_sampling(pos.view(), level_cfg.centers, start)?;
        let centers = pos.select(Axis(0), &picked);

        let mut radius_caches = Vec::with_capacity(level_cfg.radii.len());
        let mut outputs = Vec::with_capacity(level_cfg.radii.len());
        for (j, &radius) in level_cfg.radii.iter().enumerate() {
            let groups = ball_query(
                pos.view(),
                centers.view(),
                radius,
                level_cfg.max_group_size[j],
            );
            let mut offsets = Vec::with_capacity(groups.len() + 1);
            offsets.push(0);
            for g in &groups {
                offsets.push(offsets.last().unwrap() + g.len());
            }
            let flat_rows = *offsets.last().unwrap();
            let group_width = 2 + feat.ncols();
            let mut flat = Array2::zeros((flat_rows, group_width));
            for (ci, group) in groups.iter().enumerate() {
                for (r, &m) in group.iter().enumerate() {
                    let fr = offsets[ci] + r;
                    flat[[fr, 0]] = pos[[m, 0]] - centers[[ci, 0]];
                    flat[[fr, 1]] = pos[[m, 1]] - centers[[ci, 1]];
                    for ch in 0..feat.ncols() {
                        flat[[fr, 2 + ch]] = feat[[m, ch]];
                    }
                }
            }

            let mut io = Vec::with_capacity(layout.msg[l][j].len());
            let mut current = flat;
            for &li in &layout.msg[l][j] {
                let step = affine(current, &params.layers[li], true)?;
                current = step.output.clone();
                io.push(step);
            }

            let width = current.ncols();
            let mut pooled = Array2::zeros((groups.len(), width));
            let mut argmax = Array2::zeros((groups.len(), width));
            for ci in 0..groups.len() {
                for ch in 0..width {
                    let mut best = f64::NEG_INFINITY;
                    let mut best_row = offsets[ci];
                    for fr in offsets[ci]..offsets[ci + 1] {
                        if current[[fr, ch]] > best {
                            best = current[[fr, ch]];
                            best_row = fr;
                        }
                    }
                    pooled[[ci, ch]] = best;
                    argmax[[ci, ch]] = best_row;
                }
            }
            outputs.push(pooled);
            radius_caches.push(MsgRadiusCache { groups, offsets, io, argmax });
        }

        let views: Vec<_> = outputs.iter().map(|o| o.view()).collect();
        let level_out = concatenate(Axis(1), &views)
            .expect("radius outputs share their row count");
        msg_caches.push(MsgLevelCache {
            input_points: pos.nrows(),
            input_width: feat.ncols(),
            radii: radius_caches,
        });
        levels.push((centers, level_out));
    }

    // --- Decoder ---------------------------------------------------------
    // Walk back down: interpolate the carry onto the next finer level,
    // concatenate that level's skip features, refine with an MLP.
    let mut fp_caches = Vec::with_capacity(3);
    let mut carry = levels[3].1.clone();
    let mut carry_level = 3;
    for (l, _) in config.fp_widths.iter().enumerate() {
        let fine_level = carry_level - 1;
        let (fine_pos, skip) = &levels[fine_level];
        let coarse_pos = &levels[carry_level].0;
        let neighbors = interp_neighbors(fine_pos.view(), coarse_pos.view());
        let interp = apply_interp(&neighbors, carry.view(), fine_pos.nrows());
        let concat = concatenate(Axis(1), &[interp.view(), skip.view()])
            .expect("interp and skip share their row count");

        let mut io = Vec::with_capacity(layout.fp[l].len());
        let mut current = concat;
        for &li in &layout.fp[l] {
            let step = affine(current, &params.layers[li], true)?;
            current = step.output.clone();
            io.push(step);
        }
        fp_caches.push(FpCache {
            neighbors,
            coarse_count: coarse_pos.nrows(),
            carry_width: carry.ncols(),
            io,
        });
        carry = current;
        carry_level = fine_level;
    }

    // --- Per-point head ----------------------------------------------------
    let mut fc_io = Vec::with_capacity(3);
    let mut masks: [Option<Array2<f64>>; 2] = [None, None];
    let mut current = carry;
    for (k, &li) in layout.fc.iter().enumerate() {
        let relu = k < 2;
        let step = affine(current, &params.layers[li], relu)?;
        current = step.output.clone();
        if relu && config.dropout > 0.0 {
            if let DropoutMode::Enabled(rng) = &mut dropout {
                let mask =
                    dropout_mask(current.nrows(), current.ncols(), config.dropout, rng);
                current *= &mask;
                masks[k] = Some(mask);
            }
        }
        fc_io.push(step);
    }

    let logits = current;
    let cache = ForwardCache {
        msg: msg_caches,
        fp: fp_caches,
        fc: FcCache { io: fc_io, masks },
    };
    Ok((logits, cache))
}

/// Run the network and return per-point class probabilities (`n x classes`).
pub fn forward(
    positions: ArrayView2<'_, f64>,
    features: ArrayView2<'_, f64>,
    params: &NetworkParams,
    config: &NetworkConfig,
    dropout: DropoutMode<'_>,
) -> Result<Array2<f64>, PointsegError> {
    let layout = check_params(params, config)?;
    let (logits, _) =
        run_forward(positions, features, params, config, &layout, dropout)?;
    Ok(softmax(logits.view()))
}

// ---------------------------------------------------------------------------
// Backward pass
// ---------------------------------------------------------------------------

fn msg_backward(
    cache: &MsgLevelCache,
    d_out: &Array2<f64>,
    params: &NetworkParams,
    layer_indices: &[Vec<usize>],
    grads: &mut Gradients,
) -> Array2<f64> {
    let mut d_feat = Array2::zeros((cache.input_points, cache.input_width));
    let mut col = 0;
    for (j, rc) in cache.radii.iter().enumerate() {
        let last = rc.io.last().expect("validated nonempty MLP");
        let width = last.output.ncols();
        let flat_rows = last.output.nrows();

        // Max-pool: each pooled channel routes its gradient to the row that
        // produced the maximum.
        let mut g = Array2::zeros((flat_rows, width));
        for ci in 0..rc.argmax.nrows() {
            for ch in 0..width {
                g[[rc.argmax[[ci, ch]], ch]] += d_out[[ci, col + ch]];
            }
        }
        col += width;

        for k in (0..layer_indices[j].len()).rev() {
            let li = layer_indices[j][k];
            g = affine_backward(
                &rc.io[k],
                &params.layers[li],
                g,
                true,
                &mut grads.layers[li],
            );
        }

        // Scatter the feature part of the group rows back onto the level's
        // input points; the two recentered coordinate columns are constants.
        for (ci, group) in rc.groups.iter().enumerate() {
            for (r, &m) in group.iter().enumerate() {
                let fr = rc.offsets[ci] + r;
                for ch in 0..cache.input_width {
                    d_feat[[m, ch]] += g[[fr, 2 + ch]];
                }
            }
        }
    }
    d_feat
}

fn backward(
    cache: &ForwardCache,
    dlogits: Array2<f64>,
    params: &NetworkParams,
    layout: &Layout,
) -> Gradients {
    let mut grads = Gradients::zeros_like(params);

    // Head, in reverse: plain affine for the logits layer, masked dropout
    // and ReLU for the two hidden layers.
    let mut g = dlogits;
    for k in (0..3).rev() {
        let li = layout.fc[k];
        if k < 2 {
            if let Some(mask) = &cache.fc.masks[k] {
                g *= mask;
            }
        }
        g = affine_backward(
            &cache.fc.io[k],
            &params.layers[li],
            g,
            k < 2,
            &mut grads.layers[li],
        );
    }

    // Decoder, in reverse.  `skip_grads[level]` collects gradients flowing
    // into that encoder level's output through skip connections.
    let mut skip_grads: [Option<Array2<f64>>; 3] = [None, None, None];
    for l in (0..cache.fp.len()).rev() {
        let fpc = &cache.fp[l];
        for k in (0..layout.fp[l].len()).rev() {
            let li = layout.fp[l][k];
            g = affine_backward(
                &fpc.io[k],
                &params.layers[li],
                g,
                true,
                &mut grads.layers[li],
            );
        }
        let carry = fpc.carry_width;
        let d_interp = g.slice(s![.., ..carry]);
        let d_skip = g.slice(s![.., carry..]).to_owned();
        let mut d_coarse = Array2::zeros((fpc.coarse_count, carry));
        for (i, nbrs) in fpc.neighbors.iter().enumerate() {
            for &(j, w) in nbrs {
                for ch in 0..carry {
                    d_coarse[[j, ch]] += w * d_interp[[i, ch]];
                }
            }
        }
        // fp step l lands on encoder level 2-l; its skip features are that
        // level's features (level 0's skip is the raw input, dropped below).
        let fine_level = 2 - l;
        if fine_level > 0 {
            skip_grads[fine_level] = Some(d_skip);
        }
        g = d_coarse;
    }

    // Encoder, in reverse; `g` arrives as the gradient of the deepest output.
    for l in (0..cache.msg.len()).rev() {
        let d_feat = msg_backward(&cache.msg[l], &g, params, &layout.msg[l], &mut grads);
        g = match skip_grads[l].take() {
            Some(skip) => skip + d_feat,
            None => d_feat,
        };
    }
    // `g` is now the gradient w.r.t. the raw input features: constants.
    grads
}

/// One full supervised step on a cloud: forward, weighted cross-entropy,
/// analytic backward.  `labels` are class indices in `0..config.classes`.
pub fn loss_and_gradients(
    positions: ArrayView2<'_, f64>,
    features: ArrayView2<'_, f64>,
    labels: &[usize],
    props: &ClassProportions,
    params: &NetworkParams,
    config: &NetworkConfig,
    dropout: DropoutMode<'_>,
) -> Result<StepOutput, PointsegError> {
    let layout = check_params(params, config)?;
    let (logits, cache) =
        run_forward(positions, features, params, config, &layout, dropout)?;
    let probs = softmax(logits.view());
    let (loss, dlogits) = weighted_ce_loss(probs.view(), labels, props)?;
    let gradients = backward(&cache, dlogits, params, &layout);
    Ok(StepOutput { loss, probs, gradients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;

    fn tiny_config() -> NetworkConfig {
        NetworkConfig {
            input_dim: 4,
            msg: vec![
                crate::config::MsgLevelConfig {
                    centers: 8,
                    radii: vec![0.5, 1.0],
                    max_group_size: vec![4, 8],
                    mlp_widths: vec![vec![4, 4], vec![4, 4]],
                },
                crate::config::MsgLevelConfig {
                    centers: 4,
                    radii: vec![1.0, 2.0],
                    max_group_size: vec![4, 8],
                    mlp_widths: vec![vec![6, 6], vec![6, 6]],
                },
                crate::config::MsgLevelConfig {
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

    fn random_cloud(n: usize, seed: u64) -> (Array2<f64>, Array2<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = Array2::from_shape_fn((n, 2), |_| rng.random_range(-4.0..4.0));
        let features = Array2::from_shape_fn((n, 4), |_| rng.random_range(-1.5..1.5));
        (positions, features)
    }

    #[test]
    fn mini_pointnet_with_identity_mlp_maxpools_recentered_rows() {
        let group = array![[1.0, 2.0], [3.0, 0.0]];
        let out = mini_pointnet(group.view(), (0.0, 0.0), &[]).unwrap();
        assert_eq!(out, array![3.0, 2.0]);
        // Recentring shifts the coordinates before pooling.
        let out = mini_pointnet(group.view(), (2.0, 1.0), &[]).unwrap();
        assert_eq!(out, array![1.0, 1.0]);
    }

    #[test]
    fn mini_pointnet_applies_the_mlp_per_row() {
        // One layer mapping (x, y) -> (x + y,) with bias 1, then ReLU.
        let layer = Layer {
            path: "test".into(),
            weight: array![[1.0], [1.0]],
            bias: array![1.0],
        };
        let group = array![[1.0, 2.0], [-5.0, 1.0]];
        let out = mini_pointnet(group.view(), (0.0, 0.0), &[&layer]).unwrap();
        // Rows map to relu(4) = 4 and relu(-3) = 0; max is 4.
        assert_eq!(out, array![4.0]);
    }

    #[test]
    fn interpolation_copies_features_at_coincident_points() {
        let coarse_pos = array![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]];
        let coarse_feat = array![[1.0, -2.0], [5.0, 5.0], [-3.0, 7.0]];
        let fine = array![[0.0, 0.0], [5.0, 0.0]];
        let out =
            interpolate_features(fine.view(), coarse_pos.view(), coarse_feat.view())
                .unwrap();
        // First fine point sits exactly on the first coarse point.
        assert!((out[[0, 0]] - 1.0).abs() < 1e-8);
        assert!((out[[0, 1]] - -2.0).abs() < 1e-8);
        // Second sits between two equally distant points plus a farther one;
        // its value must stay inside the convex hull of the features.
        assert!(out[[1, 0]] > 1.0 && out[[1, 0]] < 5.0);
    }

    #[test]
    fn interpolation_weights_fall_with_distance() {
        let coarse_pos = array![[1.0, 0.0], [4.0, 0.0]];
        let coarse_feat = array![[0.0], [10.0]];
        let fine = array![[2.0, 0.0]];
        let out =
            interpolate_features(fine.view(), coarse_pos.view(), coarse_feat.view())
                .unwrap();
        // Weights 1/1 and 1/2, normalized: 2/3 and 1/3 -> 10/3.
        assert!((out[[0, 0]] - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dropout_mask_statistics_match_the_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mask = dropout_mask(1000, 100, 0.5, &mut rng);
        let zeros = mask.iter().filter(|&&v| v == 0.0).count();
        // Binomial(1e5, 0.5): sigma = sqrt(1e5 * 0.25) ~ 158; allow 3 sigma.
        let dev = (zeros as f64 - 50_000.0).abs();
        assert!(dev < 3.0 * 158.2, "zeros = {zeros}");
        // Surviving entries carry the exact inverse keep probability.
        assert!(mask.iter().all(|&v| v == 0.0 || v == 2.0));
    }

    #[test]
    fn forward_emits_probability_rows() {
        let config = tiny_config();
        let params = NetworkParams::init(&config, 3).unwrap();
        let (pos, feat) = random_cloud(24, 11);
        let probs =
            forward(pos.view(), feat.view(), &params, &config, DropoutMode::Disabled)
                .unwrap();
        assert_eq!(probs.dim(), (24, 3));
        for row in probs.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-6);
            assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn forward_is_deterministic_in_eval_mode() {
        let config = tiny_config();
        let params = NetworkParams::init(&config, 5).unwrap();
        let (pos, feat) = random_cloud(20, 13);
        let a = forward(pos.view(), feat.view(), &params, &config, DropoutMode::Disabled)
            .unwrap();
        let b = forward(pos.view(), feat.view(), &params, &config, DropoutMode::Disabled)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn training_mode_dropout_changes_outputs() {
        let config = tiny_config();
        let params = NetworkParams::init(&config, 5).unwrap();
        let (pos, feat) = random_cloud(20, 13);
        let eval =
            forward(pos.view(), feat.view(), &params, &config, DropoutMode::Disabled)
                .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let train = forward(
            pos.view(),
            feat.view(),
            &params,
            &config,
            DropoutMode::Enabled(&mut rng),
        )
        .unwrap();
        assert_ne!(eval, train);
    }

    #[test]
    fn non_finite_activations_name_the_layer() {
        let config = tiny_config();
        let mut params = NetworkParams::init(&config, 5).unwrap();
        let idx = params.layers.iter().position(|l| l.path == "fp1.layer0").unwrap();
        params.layers[idx].weight.mapv_inplace(|_| 1e308);
        let (pos, feat) = random_cloud(20, 13);
        let err =
            forward(pos.view(), feat.view(), &params, &config, DropoutMode::Disabled)
                .unwrap_err();
        assert!(err.to_string().contains("fp1.layer0"), "got: {err}");
    }

    #[test]
    fn mismatched_params_are_rejected() {
        let config = tiny_config();
        let mut other = tiny_config();
        other.fc_hidden = [8, 8];
        let params = NetworkParams::init(&other, 5).unwrap();
        let (pos, feat) = random_cloud(20, 13);
        assert!(forward(
            pos.view(),
            feat.view(),
            &params,
            &config,
            DropoutMode::Disabled
        )
        .is_err());
    }

    #[test]
    fn sampling_starts_at_the_strongest_return() {
        let feat = array![
            [0.0, 0.0, 0.0, 0.3],
            [0.0, 0.0, 0.0, 2.5],
            [0.0, 0.0, 0.0, 1.1]
        ];
        assert_eq!(sampling_start(feat.view()), 1);
        // Without a salience channel the first point seeds the sampling.
        let narrow = array![[0.0, 0.0, 0.0], [1.0, 1.0, 9.0]];
        assert_eq!(sampling_start(narrow.view()), 0);
    }

    #[test]
    fn undersized_clouds_are_rejected() {
        let config = tiny_config();
        let params = NetworkParams::init(&config, 5).unwrap();
        let (pos, feat) = random_cloud(4, 13); // fewer than 8 centers
        assert!(matches!(
            forward(pos.view(), feat.view(), &params, &config, DropoutMode::Disabled),
            Err(PointsegError::TooFewPoints { .. })
        ));
    }
}
