//! Confusion matrices and the derived point-wise scores.
//!
//! All scores are percentages.  Zero denominators yield 0 by convention, so
//! a class that never occurs and is never predicted scores 0 rather than
//! poisoning aggregates with NaN.

use ndarray::{Array2, ArrayView2};

use crate::error::EvalError;

/// Count matrix with truth on the rows and predictions on the columns.
pub fn confusion_matrix(
    truth: &[usize],
    predictions: &[usize],
    classes: usize,
) -> Result<Array2<u64>, EvalError> {
    if truth.len() != predictions.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth.len(),
            predictions: predictions.len(),
        });
    }
    let mut matrix = Array2::zeros((classes, classes));
    for (&t, &p) in truth.iter().zip(predictions) {
        if t >= classes {
            return Err(EvalError::UnknownClass { index: t, classes });
        }
        if p >= classes {
            return Err(EvalError::UnknownClass { index: p, classes });
        }
        matrix[[t, p]] += 1;
    }
    Ok(matrix)
}

/// Percentage of predictions of `class` that were correct: `TP / (TP + FP)`.
pub fn precision(matrix: ArrayView2<'_, u64>, class: usize) -> f64 {
    let tp = matrix[[class, class]] as f64;
    let predicted: u64 = matrix.column(class).iter().sum();
    if predicted == 0 {
        0.0
    } else {
        100.0 * tp / predicted as f64
    }
}

/// Percentage of true `class` points that were found: `TP / (TP + FN)`.
pub fn recall(matrix: ArrayView2<'_, u64>, class: usize) -> f64 {
    let tp = matrix[[class, class]] as f64;
    let actual: u64 = matrix.row(class).iter().sum();
    if actual == 0 {
        0.0
    } else {
        100.0 * tp / actual as f64
    }
}

/// Harmonic mean of precision and recall, in percent.
pub fn f1(matrix: ArrayView2<'_, u64>, class: usize) -> f64 {
    harmonic_mean(precision(matrix, class), recall(matrix, class))
}

/// Harmonic mean of two percentages; 0 when either is 0.
pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Arithmetic mean over an explicit score set (e.g. every non-background
/// class).  An empty set is a caller bug, not a zero.
pub fn macro_average(scores: &[f64]) -> Result<f64, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyInclusionSet);
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Among false positives of the given real-object classes, the share whose
/// ground truth is one of the ghost classes, in percent.
///
/// Returns the percentage together with the total false-positive count; a
/// zero count reports 0% and lets the caller flag "no false positives".
pub fn ghost_fp_fraction(
    matrix: ArrayView2<'_, u64>,
    real_classes: &[usize],
    ghost_classes: &[usize],
) -> Result<(f64, u64), EvalError> {
    if real_classes.iter().any(|r| ghost_classes.contains(r)) {
        return Err(EvalError::OverlappingClassSets);
    }
    let classes = matrix.nrows();
    for &c in real_classes.iter().chain(ghost_classes) {
        if c >= classes {
            return Err(EvalError::UnknownClass { index: c, classes });
        }
    }
    let mut total_fp = 0u64;
    let mut ghost_fp = 0u64;
    for &pred in real_classes {
        for truth in 0..classes {
            if truth == pred {
                continue;
            }
            let count = matrix[[truth, pred]];
            total_fp += count;
            if ghost_classes.contains(&truth) {
                ghost_fp += count;
            }
        }
    }
    let fraction = if total_fp == 0 {
        0.0
    } else {
        100.0 * ghost_fp as f64 / total_fp as f64
    };
    Ok((fraction, total_fp))
}

/// Render a percentage with two decimals, rounding half up.
///
/// The value is first written out to six decimals (recovering the intended
/// decimal value from the binary float) and then rounded half-up on that
/// decimal string, so 74.485 prints as "74.49" even though the nearest
/// binary double sits fractionally below 74.485.
pub fn format_percent(value: f64) -> String {
    let text = format!("{value:.6}");
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", &text[..]),
    };
    let (int_part, frac) = body.split_once('.').expect("{:.6} always has a point");
    let mut cents: u64 = format!("{int_part}{}", &frac[..2])
        .parse()
        .expect("digits only");
    if frac.as_bytes()[2] >= b'5' {
        cents += 1;
    }
    format!("{sign}{}.{:02}", cents / 100, cents % 100)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn perfect_predictions_make_a_diagonal_matrix() {
        let truth = [0, 1, 2, 1, 0];
        let m = confusion_matrix(&truth, &truth, 3).unwrap();
        assert_eq!(m, array![[2, 0, 0], [0, 2, 0], [0, 0, 1]]);
        for c in 0..3 {
            assert_eq!(precision(m.view(), c), 100.0);
            assert_eq!(recall(m.view(), c), 100.0);
            assert_eq!(f1(m.view(), c), 100.0);
        }
    }

    #[test]
    fn empty_streams_make_a_zero_matrix() {
        let m = confusion_matrix(&[], &[], 3).unwrap();
        assert_eq!(m.sum(), 0);
        assert_eq!(precision(m.view(), 1), 0.0);
        assert_eq!(recall(m.view(), 1), 0.0);
        assert_eq!(f1(m.view(), 1), 0.0);
    }

    #[test]
    fn out_of_range_labels_are_rejected() {
        assert!(matches!(
            confusion_matrix(&[3], &[0], 3),
            Err(EvalError::UnknownClass { index: 3, classes: 3 })
        ));
        assert!(confusion_matrix(&[0], &[5], 3).is_err());
        assert!(confusion_matrix(&[0, 1], &[0], 3).is_err());
    }

    #[test]
    fn textbook_counts_give_eighty_percent() {
        // TP=8, FP=2, FN=2 on a two-class matrix.
        let m = array![[90u64, 2], [2, 8]];
        assert!((precision(m.view(), 1) - 80.0).abs() < 1e-12);
        assert!((recall(m.view(), 1) - 80.0).abs() < 1e-12);
        assert!((f1(m.view(), 1) - 80.0).abs() < 1e-12);
    }

    #[test]
    fn zero_true_positives_score_zero() {
        let m = array![[5u64, 3], [0, 0]];
        assert_eq!(precision(m.view(), 1), 0.0);
        assert_eq!(recall(m.view(), 1), 0.0);
        assert_eq!(f1(m.view(), 1), 0.0);
    }

    #[test]
    fn published_score_arithmetic_is_self_consistent() {
        // Rounded per-class precision/recall reproduce the published F1
        // within rounding slack.
        let f = harmonic_mean(45.92, 73.36);
        assert!((f - 56.49).abs() < 0.01, "f1 was {f}");
        // Published macro averages from the same table.
        let avg = macro_average(&[94.47, 54.50]).unwrap();
        assert_eq!(format_percent(avg), "74.49");
        let avg = macro_average(&[92.81, 92.96]).unwrap();
        assert_eq!(format_percent(avg), "92.89");
    }

    #[test]
    fn macro_average_needs_at_least_one_label() {
        assert!(matches!(macro_average(&[]), Err(EvalError::EmptyInclusionSet)));
        assert_eq!(macro_average(&[61.5]).unwrap(), 61.5);
    }

    #[test]
    fn ghost_fraction_counts_ghost_truth_false_positives() {
        // Rows: bg, object, ghost; predictions in columns.
        let m = array![[100u64, 7065, 0], [0, 500, 0], [0, 603, 10]];
        let (frac, total) = ghost_fp_fraction(m.view(), &[1], &[2]).unwrap();
        assert_eq!(total, 7668);
        assert_eq!(format_percent(frac), "7.86");
    }

    #[test]
    fn ghost_fraction_edge_cases() {
        // No false positives at all -> 0 with a zero count.
        let m = array![[10u64, 0, 0], [0, 5, 0], [0, 0, 3]];
        let (frac, total) = ghost_fp_fraction(m.view(), &[1], &[2]).unwrap();
        assert_eq!((frac, total), (0.0, 0));
        // Every false positive has ghost truth -> 100%.
        let m = array![[10u64, 0, 0], [0, 5, 0], [0, 4, 0]];
        let (frac, total) = ghost_fp_fraction(m.view(), &[1], &[2]).unwrap();
        assert_eq!(total, 4);
        assert_eq!(frac, 100.0);
        // Ghost and real sets must not overlap.
        assert!(ghost_fp_fraction(m.view(), &[1], &[1]).is_err());
    }

    #[test]
    fn f1_is_a_harmonic_mean() {
        assert_eq!(harmonic_mean(0.0, 80.0), 0.0);
        assert_eq!(harmonic_mean(50.0, 50.0), 50.0);
        let f = harmonic_mean(30.0, 90.0);
        assert!(f <= 2.0 * 30.0 && f <= 2.0 * 90.0);
        assert!((f - 45.0).abs() < 1e-12);
    }

    #[test]
    fn percent_formatting_rounds_half_up_on_the_decimal_string() {
        assert_eq!(format_percent(74.485), "74.49");
        assert_eq!(format_percent(92.885), "92.89");
        assert_eq!(format_percent(56.4838), "56.48");
        assert_eq!(format_percent(0.0), "0.00");
        assert_eq!(format_percent(100.0), "100.00");
        assert_eq!(format_percent(99.995), "100.00");
        assert_eq!(format_percent(7.8638), "7.86");
        assert_eq!(format_percent(0.004), "0.00");
        assert_eq!(format_percent(0.005), "0.01");
    }
}
