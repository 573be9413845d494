//! Point sampling and neighborhood grouping.
//!
//! Both operations work on raw (unstandardized) coordinates so that grouping
//! radii keep their physical meaning in meters.  All ties break toward the
//! lowest point index, which keeps every downstream result reproducible.

use ndarray::ArrayView2;

use crate::error::PointsegError;

fn dist2(a: ArrayView2<'_, f64>, i: usize, b: ArrayView2<'_, f64>, j: usize) -> f64 {
    a.row(i)
        .iter()
        .zip(b.row(j).iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Greedy farthest point sampling.
///
/// Starting from `start`, repeatedly picks the point whose distance to the
/// nearest already-selected point is largest, until `k` indices are chosen.
/// Distance ties resolve to the lowest index.
pub fn farthest_point_sampling(
    positions: ArrayView2<'_, f64>,
    k: usize,
    start: usize,
) -> Result<Vec<usize>, PointsegError> {
    let n = positions.nrows();
    if k > n {
        return Err(PointsegError::TooFewPoints { requested: k, available: n });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if start >= n {
        return Err(PointsegError::ShapeMismatch(format!(
            "start index {start} out of range for {n} points"
        )));
    }

    let mut selected = Vec::with_capacity(k);
    selected.push(start);
    // Squared distance to the nearest selected point; -1 marks "selected",
    // which can never win the argmax because real distances are >= 0.
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| dist2(positions, i, positions, start))
        .collect();
    nearest[start] = -1.0;

    while selected.len() < k {
        let mut best = usize::MAX;
        let mut best_dist = -1.0;
        for (i, &d) in nearest.iter().enumerate() {
            if d > best_dist {
                best_dist = d;
                best = i;
            }
        }
        selected.push(best);
        nearest[best] = -1.0;
        for (i, slot) in nearest.iter_mut().enumerate() {
            if *slot >= 0.0 {
                let d = dist2(positions, i, positions, best);
                if d < *slot {
                    *slot = d;
                }
            }
        }
    }
    Ok(selected)
}

/// Collect, for every center, the indices of points within `radius`,
/// nearest first, capped at `max_samples`.  A center with no point in range
/// falls back to the single nearest point so no group is ever empty.
pub fn ball_query(
    points: ArrayView2<'_, f64>,
    centers: ArrayView2<'_, f64>,
    radius: f64,
    max_samples: usize,
) -> Vec<Vec<usize>> {
    let r2 = radius * radius;
    let mut groups = Vec::with_capacity(centers.nrows());
    for c in 0..centers.nrows() {
        let mut in_range: Vec<(f64, usize)> = (0..points.nrows())
            .filter_map(|i| {
                let d = dist2(points, i, centers, c);
                (d <= r2).then_some((d, i))
            })
            .collect();
        in_range.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        in_range.truncate(max_samples);
        if in_range.is_empty() {
            let nearest = (0..points.nrows())
                .map(|i| (dist2(points, i, centers, c), i))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, i)| i)
                .expect("ball_query requires a nonempty point set");
            groups.push(vec![nearest]);
        } else {
            groups.push(in_range.into_iter().map(|(_, i)| i).collect());
        }
    }
    groups
}
