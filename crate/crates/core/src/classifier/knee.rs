//! Knee (elbow) selection on a descending score curve.
//!
//! Ranks and scores are min-max normalized to [0, 1] and compared against
//! the chord joining the first and last point:
//! `d(i) = y(i) - (1 - x(i))`. Positive local maxima of `d` are knees of a
//! concave stretch (plateau before a drop), negative local minima are elbows
//! of a convex stretch (steep fall into a long tail). An extremum is accepted
//! once the curve later moves away from it by `KNEE_SENSITIVITY / (n - 1)`;
//! the first accepted extremum wins. If none is accepted the extremum with
//! the largest `|d|` is used.

/// Kneedle sensitivity, in units of the normalized rank spacing.
pub const KNEE_SENSITIVITY: f64 = 1.0;

const LINEAR_TOLERANCE: f64 = 1e-9;
const COMPARE_EPS: f64 = 1e-12;

/// Number of leading entries to keep (`knee index + 1`).
///
/// Lists with fewer than three distinct values and straight lines keep
/// everything.
pub fn find_knee(scores: &[f64]) -> usize {
    let n = scores.len();
    if n < 3 {
        return n;
    }
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return n;
    }
    let (min, max) = (distinct[0], distinct[distinct.len() - 1]);
    let range = max - min;
    let step = 1.0 / (n - 1) as f64;
    let diff: Vec<f64> = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| (s - min) / range - (1.0 - i as f64 * step))
        .collect();
    if diff.iter().all(|d| d.abs() <= LINEAR_TOLERANCE) {
        return n;
    }

    // (index, is_maximum)
    let mut extrema = Vec::new();
    for i in 1..n - 1 {
        let (prev, cur, next) = (diff[i - 1], diff[i], diff[i + 1]);
        if cur - prev > COMPARE_EPS && cur - next >= -COMPARE_EPS {
            extrema.push((i, true));
        } else if prev - cur > COMPARE_EPS && next - cur >= -COMPARE_EPS {
            extrema.push((i, false));
        }
    }
    let threshold = KNEE_SENSITIVITY * step;
    let confirmed = extrema.iter().find(|&&(i, is_max)| {
        diff[i + 1..].iter().any(|&later| {
            if is_max {
                later < diff[i] - threshold
            } else {
                later > diff[i] + threshold
            }
        })
    });
    let knee = confirmed
        .or_else(|| extrema.iter().max_by(|a, b| diff[a.0].abs().total_cmp(&diff[b.0].abs())))
        .map(|&(i, _)| i);
    match knee {
        Some(i) => i + 1,
        None => n,
    }
}
