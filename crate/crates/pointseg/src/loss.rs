//! Classification loss with inverse-frequency class weighting.
//!
//! Radar clouds are dominated by background returns, so an unweighted
//! cross-entropy would reward predicting background everywhere.  Each
//! point's loss is therefore scaled by `1 / (c * s_l)`, where `c` is the
//! number of classes and `s_l` the training-set fraction of the point's
//! true class: rare classes weigh more, and for a perfectly balanced set
//! the weights all collapse to 1.

use ndarray::{Array2, ArrayView2};

use crate::error::PointsegError;

/// Smallest probability fed to the logarithm.
pub const LOG_FLOOR: f64 = 1e-12;

/// Training-set class fractions, indexed by class id.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProportions {
    fractions: Vec<f64>,
}

impl ClassProportions {
    /// Validate and wrap class fractions.  Every class must actually occur
    /// (zero fractions would produce infinite weights) and the fractions
    /// must sum to one.
    pub fn new(fractions: Vec<f64>) -> Result<Self, PointsegError> {
        if fractions.len() < 2 {
            return Err(PointsegError::InvalidProportions(
                "need at least two classes".into(),
            ));
        }
        if fractions.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
            return Err(PointsegError::InvalidProportions(
                "every fraction must lie in (0, 1]".into(),
            ));
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(PointsegError::InvalidProportions(format!(
                "fractions sum to {sum}, expected 1"
            )));
        }
        Ok(ClassProportions { fractions })
    }

    /// Number of classes.
    pub fn class_count(&self) -> usize {
        self.fractions.len()
    }

    /// Fraction of training points with this class.
    pub fn fraction(&self, class: usize) -> f64 {
        self.fractions[class]
    }

    /// Loss weight `1 / (c * s_l)` for a point of this class.
    pub fn weight(&self, class: usize) -> f64 {
        1.0 / (self.fractions.len() as f64 * self.fractions[class])
    }
}

/// Row-wise softmax with the usual max-subtraction for stability.
pub fn softmax(logits: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut probs = logits.to_owned();
    for mut row in probs.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum: f64 = row.iter().sum();
        row.mapv_inplace(|v| v / sum);
    }
    probs
}

/// Weighted cross-entropy over all points of a cloud.
///
/// Takes softmax probabilities (`n x c`), per-point class labels and the
/// training proportions; returns the mean per-point loss together with its
/// gradient with respect to the logits that produced the probabilities.
pub fn weighted_ce_loss(
    probs: ArrayView2<'_, f64>,
    labels: &[usize],
    props: &ClassProportions,
) -> Result<(f64, Array2<f64>), PointsegError> {
    let n = probs.nrows();
    let c = probs.ncols();
    if labels.len() != n {
        return Err(PointsegError::ShapeMismatch(format!(
            "{n} probability rows but {} labels",
            labels.len()
        )));
    }
    if c != props.class_count() {
        return Err(PointsegError::ShapeMismatch(format!(
            "{c} probability columns but {} class proportions",
            props.class_count()
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
        return Err(PointsegError::ShapeMismatch(format!(
            "label {bad} out of range for {c} classes"
        )));
    }

    let mut loss = 0.0;
    let mut dlogits = Array2::zeros((n, c));
    let scale = 1.0 / n as f64;
    for (i, &label) in labels.iter().enumerate() {
        let w = props.weight(label);
        let p = probs[[i, label]].max(LOG_FLOOR);
        loss += -p.ln() * w;
        for j in 0..c {
            let indicator = if j == label { 1.0 } else { 0.0 };
            dlogits[[i, j]] = (probs[[i, j]] - indicator) * w * scale;
        }
    }
    Ok((loss * scale, dlogits))
}
