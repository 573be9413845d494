//! Network architecture description.
//!
//! The segmentation network is fixed at three multi-scale grouping encoder
//! levels, three feature-propagation decoder levels and a three-layer
//! per-point classification head.  Everything that varies between runs —
//! center counts, grouping radii, layer widths, class count — lives in
//! [`NetworkConfig`] so that a checkpoint can describe itself completely.

use serde::{Deserialize, Serialize};

use crate::error::PointsegError;

/// One encoder level: how many centers to sample and, per grouping radius,
/// how large the neighborhoods may grow and which MLP digests them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsgLevelConfig {
    /// Number of farthest-point-sampled centers kept at this level.
    pub centers: usize,
    /// Grouping radii in meters, strictly increasing.
    pub radii: Vec<f64>,
    /// Per radius: maximum number of neighbors fed to the MLP.
    pub max_group_size: Vec<usize>,
    /// Per radius: output widths of the shared MLP layers.
    pub mlp_widths: Vec<Vec<usize>>,
}

impl MsgLevelConfig {
    /// Total feature width this level emits (concatenation over radii).
    pub fn output_width(&self) -> usize {
        self.mlp_widths.iter().map(|w| *w.last().unwrap_or(&0)).sum()
    }
}

/// Complete architecture of the point segmentation network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Width of the per-point input feature rows.
    pub input_dim: usize,
    /// The three encoder levels, finest first.
    pub msg: Vec<MsgLevelConfig>,
    /// Decoder MLP widths, one list per propagation step (coarsest first).
    pub fp_widths: Vec<Vec<usize>>,
    /// Hidden widths of the first two classification layers; the third layer
    /// always projects to `classes`.
    pub fc_hidden: [usize; 2],
    /// Dropout rate applied after the first two classification layers
    /// during training.
    pub dropout: f64,
    /// Number of output classes.
    pub classes: usize,
}

impl NetworkConfig {
    /// The reference architecture sized for full-resolution clouds.
    pub fn reference(input_dim: usize, classes: usize) -> Self {
        NetworkConfig {
            input_dim,
            msg: vec![
                MsgLevelConfig {
                    centers: 512,
                    radii: vec![0.5, 1.0],
                    max_group_size: vec![32, 32],
                    mlp_widths: vec![vec![16, 16, 32], vec![16, 16, 32]],
                },
                MsgLevelConfig {
                    centers: 128,
                    radii: vec![1.0, 2.0],
                    max_group_size: vec![32, 32],
                    mlp_widths: vec![vec![32, 32, 64], vec![32, 32, 64]],
                },
                MsgLevelConfig {
                    centers: 32,
                    radii: vec![2.0, 4.0],
                    max_group_size: vec![32, 32],
                    mlp_widths: vec![vec![64, 64, 128], vec![64, 64, 128]],
                },
            ],
            fp_widths: vec![vec![128, 64], vec![64, 32], vec![32, 32]],
            fc_hidden: [32, 32],
            dropout: 0.5,
            classes,
        }
    }

    /// A deliberately small architecture for quick tests and experiments on
    /// subsampled clouds.  Same shape, a fraction of the parameters.
    pub fn compact(input_dim: usize, classes: usize) -> Self {
        NetworkConfig {
            input_dim,
            msg: vec![
                MsgLevelConfig {
                    centers: 32,
                    radii: vec![0.5, 1.0],
                    max_group_size: vec![8, 16],
                    mlp_widths: vec![vec![8, 8], vec![8, 8]],
                },
                MsgLevelConfig {
                    centers: 16,
                    radii: vec![1.0, 2.0],
                    max_group_size: vec![8, 16],
                    mlp_widths: vec![vec![16, 16], vec![16, 16]],
                },
                MsgLevelConfig {
                    centers: 8,
                    radii: vec![2.0, 4.0],
                    max_group_size: vec![8, 16],
                    mlp_widths: vec![vec![16, 32], vec![16, 32]],
                },
            ],
            fp_widths: vec![vec![32, 32], vec![32, 16], vec![16, 16]],
            fc_hidden: [16, 16],
            dropout: 0.5,
            classes,
        }
    }

    /// Check internal consistency; every constructor of hand-written configs
    /// should call this before building parameters.
    pub fn validate(&self) -> Result<(), PointsegError> {
        if self.input_dim == 0 {
            return Err(PointsegError::InvalidConfig("input_dim must be positive".into()));
        }
        if self.classes < 2 {
            return Err(PointsegError::InvalidConfig("classes must be at least 2".into()));
        }
        if self.msg.len() != 3 {
            return Err(PointsegError::InvalidConfig(format!(
                "expected 3 encoder levels, got {}",
                self.msg.len()
            )));
        }
        if self.fp_widths.len() != 3 {
            return Err(PointsegError::InvalidConfig(format!(
                "expected 3 propagation levels, got {}",
                self.fp_widths.len()
            )));
        }
        for (i, level) in self.msg.iter().enumerate() {
            if level.centers == 0 {
                return Err(PointsegError::InvalidConfig(format!(
                    "msg level {i}: centers must be positive"
                )));
            }
            if level.radii.is_empty() {
                return Err(PointsegError::InvalidConfig(format!(
                    "msg level {i}: at least one radius required"
                )));
            }
            if level.radii.len() != level.max_group_size.len()
                || level.radii.len() != level.mlp_widths.len()
            {
                return Err(PointsegError::InvalidConfig(format!(
                    "msg level {i}: radii, max_group_size and mlp_widths must align"
                )));
            }
            if !level.radii.windows(2).all(|w| w[0] < w[1]) {
                return Err(PointsegError::InvalidConfig(format!(
                    "msg level {i}: radii must be strictly increasing"
                )));
            }
            if level.radii.iter().any(|r| !(*r > 0.0)) {
                return Err(PointsegError::InvalidConfig(format!(
                    "msg level {i}: radii must be positive"
                )));
            }
            if level.max_group_size.iter().any(|m| *m == 0) {
                return Err(PointsegError::InvalidConfig(format!(
                    "msg level {i}: max_group_size must be positive"
                )));
            }
            if level.mlp_widths.iter().any(|w| w.is_empty() || w.contains(&0)) {
                return Err(PointsegError::InvalidConfig(format!(
                    "msg level {i}: MLP widths must be nonempty and positive"
                )));
            }
        }
        for (i, widths) in self.fp_widths.iter().enumerate() {
            if widths.is_empty() || widths.contains(&0) {
                return Err(PointsegError::InvalidConfig(format!(
                    "fp level {i}: MLP widths must be nonempty and positive"
                )));
            }
        }
        if self.fc_hidden.contains(&0) {
            return Err(PointsegError::InvalidConfig("fc widths must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(PointsegError::InvalidConfig("dropout must lie in [0, 1)".into()));
        }
        // Center counts must not grow from level to level; sampling more
        // centers than input points is an error at run time, so catch the
        // obviously impossible case here.
        for w in self.msg.windows(2) {
            if w[1].centers > w[0].centers {
                return Err(PointsegError::InvalidConfig(
                    "encoder center counts must be non-increasing".into(),
                ));
            }
        }
        Ok(())
    }
}
