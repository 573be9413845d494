//! Parameter storage, initialization and checkpointing.
//!
//! All learnable state lives in a flat, ordered list of affine layers.  The
//! order is the execution order of the forward pass, which makes gradient
//! bookkeeping trivial and gives checkpoints a canonical layout: a manifest
//! describing every layer, followed by the raw values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::PointsegError;

/// Shape and position of one affine layer within the network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    /// Stable dotted name, e.g. `msg0.radius1.layer2` or `fc0`.
    pub path: String,
    /// Input width (weight rows).
    pub rows: usize,
    /// Output width (weight columns and bias length).
    pub cols: usize,
}

/// One affine layer: `output = input · weight + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub path: String,
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    fn value_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }
}

/// Enumerate every layer of the architecture in execution order.
pub fn layer_specs(config: &NetworkConfig) -> Vec<LayerSpec> {
    let mut specs = Vec::new();
    let mut level_width = config.input_dim;
    for (l, level) in config.msg.iter().enumerate() {
        let group_width = 2 + level_width;
        for (j, widths) in level.mlp_widths.iter().enumerate() {
            let mut input = group_width;
            for (k, &out) in widths.iter().enumerate() {
                specs.push(LayerSpec {
                    path: format!("msg{l}.radius{j}.layer{k}"),
                    rows: input,
                    cols: out,
                });
                input = out;
            }
        }
        level_width = level.output_width();
    }

    // Decoder: propagate from the coarsest level back down.  The first step
    // interpolates the deepest encoder output onto the middle level, the last
    // step lands on the input cloud whose skip features are the raw inputs.
    let skip_widths = [
        config.msg[1].output_width(),
        config.msg[0].output_width(),
        config.input_dim,
    ];
    let mut carry = config.msg[2].output_width();
    for (l, widths) in config.fp_widths.iter().enumerate() {
        let mut input = carry + skip_widths[l];
        for (k, &out) in widths.iter().enumerate() {
            specs.push(LayerSpec {
                path: format!("fp{l}.layer{k}"),
                rows: input,
                cols: out,
            });
            input = out;
        }
        carry = *widths.last().expect("validated nonempty");
    }

    let head = [config.fc_hidden[0], config.fc_hidden[1], config.classes];
    let mut input = carry;
    for (k, &out) in head.iter().enumerate() {
        specs.push(LayerSpec { path: format!("fc{k}"), rows: input, cols: out });
        input = out;
    }
    specs
}

/// The complete learnable state of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub layers: Vec<Layer>,
}

impl NetworkParams {
    /// Initialize from a seed: every weight and bias is drawn uniformly from
    /// `[-1/sqrt(fan_in), 1/sqrt(fan_in))`, in layer order, so the same seed
    /// and config always produce identical parameters.
    pub fn init(config: &NetworkConfig, seed: u64) -> Result<Self, PointsegError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = layer_specs(config)
            .into_iter()
            .map(|spec| {
                let bound = 1.0 / (spec.rows as f64).sqrt();
                let mut draw = || rng.random_range(-bound..bound);
                let weight =
                    Array2::from_shape_fn((spec.rows, spec.cols), |_| draw());
                let bias = Array1::from_shape_fn(spec.cols, |_| draw());
                Layer { path: spec.path, weight, bias }
            })
            .collect();
        Ok(NetworkParams { layers })
    }

    /// Total number of scalar values across all layers.
    pub fn value_count(&self) -> usize {
        self.layers.iter().map(Layer::value_count).sum()
    }

    /// Copy every value into one flat vector, layer by layer, weights
    /// (row-major) before biases.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.value_count());
        for layer in &self.layers {
            flat.extend(layer.weight.iter());
            flat.extend(layer.bias.iter());
        }
        flat
    }

    /// Overwrite every value from a flat vector produced by [`flatten`].
    ///
    /// [`flatten`]: NetworkParams::flatten
    pub fn assign_from_flat(&mut self, flat: &[f64]) -> Result<(), PointsegError> {
        if flat.len() != self.value_count() {
            return Err(PointsegError::ShapeMismatch(format!(
                "flat vector has {} values, network has {}",
                flat.len(),
                self.value_count()
            )));
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            for w in layer.weight.iter_mut() {
                *w = flat[offset];
                offset += 1;
            }
            for b in layer.bias.iter_mut() {
                *b = flat[offset];
                offset += 1;
            }
        }
        Ok(())
    }

    /// Return the first layer whose values are not all finite, if any.
    pub fn first_non_finite(&self) -> Option<&str> {
        self.layers
            .iter()
            .find(|l| {
                l.weight.iter().any(|v| !v.is_finite())
                    || l.bias.iter().any(|v| !v.is_finite())
            })
            .map(|l| l.path.as_str())
    }
}

/// Gradients with the same layout as [`NetworkParams`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<(Array2<f64>, Array1<f64>)>,
}

impl Gradients {
    /// All-zero gradients matching the given parameters.
    pub fn zeros_like(params: &NetworkParams) -> Self {
        Gradients {
            layers: params
                .layers
                .iter()
                .map(|l| {
                    (Array2::zeros(l.weight.raw_dim()), Array1::zeros(l.bias.raw_dim()))
                })
                .collect(),
        }
    }

    /// Element-wise addition of another gradient set.
    pub fn accumulate(&mut self, other: &Gradients) {
        for ((w, b), (ow, ob)) in self.layers.iter_mut().zip(&other.layers) {
            *w += ow;
            *b += ob;
        }
    }

    /// Multiply every entry by a constant (e.g. 1/batch for averaging).
    pub fn scale(&mut self, factor: f64) {
        for (w, b) in &mut self.layers {
            w.mapv_inplace(|v| v * factor);
            b.mapv_inplace(|v| v * factor);
        }
    }

    /// Flat view matching [`NetworkParams::flatten`] ordering.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for (w, b) in &self.layers {
            flat.extend(w.iter());
            flat.extend(b.iter());
        }
        flat
    }
}

/// Everything a stored network needs to be rebuilt exactly.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub config: NetworkConfig,
    pub seed: u64,
    pub params: NetworkParams,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    seed: u64,
    config: NetworkConfig,
    layers: Vec<LayerSpec>,
}

const CHECKPOINT_MAGIC: &str = "pointseg-checkpoint v1";

/// Write a checkpoint: a text header and JSON manifest describing every
/// layer, followed by all values as little-endian `f64`, weights (row-major)
/// before biases, in layer order.
pub fn save_checkpoint(
    path: &Path,
    params: &NetworkParams,
    config: &NetworkConfig,
    seed: u64,
) -> Result<(), PointsegError> {
    if let Some(layer) = params.first_non_finite() {
        return Err(PointsegError::NonFinite { layer: layer.to_string() });
    }
    let manifest = Manifest {
        seed,
        config: config.clone(),
        layers: params
            .layers
            .iter()
            .map(|l| LayerSpec {
                path: l.path.clone(),
                rows: l.weight.nrows(),
                cols: l.weight.ncols(),
            })
            .collect(),
    };
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{CHECKPOINT_MAGIC}")?;
    writeln!(out, "{}", serde_json::to_string(&manifest)?)?;
    writeln!(out, "data f64-le {}", params.value_count())?;
    for value in params.flatten() {
        out.write_all(&value.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Read a checkpoint written by [`save_checkpoint`], verifying the manifest
/// against the embedded config and rejecting non-finite values.
pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, PointsegError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;

    let mut lines = split_header(&bytes)?;
    let magic = lines.next_line()?;
    if magic != CHECKPOINT_MAGIC {
        return Err(PointsegError::Checkpoint(format!(
            "unrecognized header {magic:?}"
        )));
    }
    let manifest: Manifest = serde_json::from_str(lines.next_line()?)?;
    let data_line = lines.next_line()?;
    let declared: usize = data_line
        .strip_prefix("data f64-le ")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| {
            PointsegError::Checkpoint(format!("bad data descriptor {data_line:?}"))
        })?;

    manifest.config.validate()?;
    let expected = layer_specs(&manifest.config);
    if manifest.layers != expected {
        return Err(PointsegError::Checkpoint(
            "manifest layers do not match the embedded config".into(),
        ));
    }

    let body = lines.rest();
    if body.len() != declared * 8 {
        return Err(PointsegError::Checkpoint(format!(
            "expected {} bytes of values, found {}",
            declared * 8,
            body.len()
        )));
    }

    let mut offset = 0;
    let mut read_f64 = || {
        let mut buf = [0u8; 8];
        buf.copy_from_slice(&body[offset..offset + 8]);
        offset += 8;
        f64::from_le_bytes(buf)
    };
    let mut layers = Vec::with_capacity(manifest.layers.len());
    for spec in &manifest.layers {
        let weight =
            Array2::from_shape_fn((spec.rows, spec.cols), |_| read_f64());
        let bias = Array1::from_shape_fn(spec.cols, |_| read_f64());
        layers.push(Layer { path: spec.path.clone(), weight, bias });
    }
    let params = NetworkParams { layers };
    if params.value_count() != declared {
        return Err(PointsegError::Checkpoint(
            "value count does not match the manifest".into(),
        ));
    }
    if let Some(layer) = params.first_non_finite() {
        return Err(PointsegError::NonFinite { layer: layer.to_string() });
    }
    Ok(Checkpoint { config: manifest.config, seed: manifest.seed, params })
}

/// Helper that peels `\n`-terminated header lines off a byte buffer while
/// leaving the binary tail untouched.
struct HeaderLines<'a> {
    bytes: &'a [u8],
    offset: usize,
}

fn split_header(bytes: &[u8]) -> Result<HeaderLines<'_>, PointsegError> {
    Ok(HeaderLines { bytes, offset: 0 })
}

impl<'a> HeaderLines<'a> {
    fn next_line(&mut self) -> Result<&'a str, PointsegError> {
        let rest = &self.bytes[self.offset..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| PointsegError::Checkpoint("truncated header".into()))?;
        self.offset += end + 1;
        std::str::from_utf8(&rest[..end])
            .map_err(|_| PointsegError::Checkpoint("header is not UTF-8".into()))
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.offset..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;

    #[test]
    fn layer_specs_chain_widths() {
        let cfg = NetworkConfig::compact(4, 5);
        let specs = layer_specs(&cfg);
        // Encoder level 0 consumes recentered coordinates plus features.
        assert_eq!(specs[0].path, "msg0.radius0.layer0");
        assert_eq!(specs[0].rows, 2 + 4);
        // First decoder step sees the deepest output plus the middle skip.
        let fp0 = specs.iter().find(|s| s.path == "fp0.layer0").unwrap();
        assert_eq!(fp0.rows, cfg.msg[2].output_width() + cfg.msg[1].output_width());
        // Last decoder step concatenates the raw input features.
        let fp2 = specs.iter().find(|s| s.path == "fp2.layer0").unwrap();
        assert_eq!(fp2.rows, cfg.fp_widths[1].last().unwrap() + cfg.input_dim);
        // Head narrows to the class count.
        let fc2 = specs.iter().find(|s| s.path == "fc2").unwrap();
        assert_eq!(fc2.cols, 5);
    }

    #[test]
    fn init_is_deterministic_and_fan_in_bounded() {
        let cfg = NetworkConfig::compact(4, 5);
        let a = NetworkParams::init(&cfg, 7).unwrap();
        let b = NetworkParams::init(&cfg, 7).unwrap();
        assert_eq!(a, b);
        let c = NetworkParams::init(&cfg, 8).unwrap();
        assert_ne!(a, c);
        for layer in &a.layers {
            let bound = 1.0 / (layer.weight.nrows() as f64).sqrt();
            assert!(layer.weight.iter().all(|w| w.abs() <= bound));
            assert!(layer.bias.iter().all(|b| b.abs() <= bound));
        }
    }

    #[test]
    fn flatten_round_trips() {
        let cfg = NetworkConfig::compact(3, 3);
        let params = NetworkParams::init(&cfg, 1).unwrap();
        let flat = params.flatten();
        assert_eq!(flat.len(), params.value_count());
        let mut copy = NetworkParams::init(&cfg, 99).unwrap();
        copy.assign_from_flat(&flat).unwrap();
        assert_eq!(copy, params);
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        let cfg = NetworkConfig::compact(4, 5);
        let params = NetworkParams::init(&cfg, 42).unwrap();
        save_checkpoint(&path, &params, &cfg, 42).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.seed, 42);
        assert_eq!(loaded.config, cfg);
        assert_eq!(loaded.params, params);
        // Bit-exact: every value identical, including signs of zeros.
        for (a, b) in params.flatten().iter().zip(loaded.params.flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn checkpoint_rejects_non_finite_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        let cfg = NetworkConfig::compact(4, 5);
        let mut params = NetworkParams::init(&cfg, 42).unwrap();
        params.layers[3].weight[[0, 0]] = f64::NAN;
        let err = save_checkpoint(&path, &params, &cfg, 42).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(&params.layers[3].path), "error was: {msg}");
    }

    #[test]
    fn checkpoint_rejects_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        let cfg = NetworkConfig::compact(4, 5);
        let params = NetworkParams::init(&cfg, 42).unwrap();
        save_checkpoint(&path, &params, &cfg, 42).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }

    #[test]
    fn gradients_accumulate_and_scale() {
        let cfg = NetworkConfig::compact(3, 3);
        let params = NetworkParams::init(&cfg, 1).unwrap();
        let mut g = Gradients::zeros_like(&params);
        let mut unit = Gradients::zeros_like(&params);
        unit.layers[0].0[[0, 0]] = 2.0;
        unit.layers[0].1[0] = 4.0;
        g.accumulate(&unit);
        g.accumulate(&unit);
        g.scale(0.5);
        assert_eq!(g.layers[0].0[[0, 0]], 2.0);
        assert_eq!(g.layers[0].1[0], 4.0);
    }
}
