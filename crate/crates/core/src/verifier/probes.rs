//! Probe levels in `[0,1]` used by the deterministic search phases.

use crate::distortion::DistortionFunction;

/// Breakpoint counts above this use the plain grid only.
pub(crate) const MAX_STRUCTURED_KNOTS: usize = 64;

pub(crate) fn sort_dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|p| (0.0..=1.0).contains(p));
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-13);
    v
}

/// The grid `i/N`, plus every breakpoint and its neighbours at offsets
/// `k/(4N)`, `k = 1, 2, 3`, when there are few breakpoints.
pub(crate) fn probe_levels(h: &DistortionFunction, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let locs = h.breakpoint_locations();
    if locs.len() <= MAX_STRUCTURED_KNOTS {
        let d = 1.0 / (4.0 * n as f64);
        for &t in &locs {
            v.push(t);
            for k in 1..=3 {
                v.push(t - k as f64 * d);
                v.push(t + k as f64 * d);
            }
        }
    }
    sort_dedup(v)
}

/// A small structural probe set: breakpoints, their neighbours at a few
/// scales below the smallest gap, and a coarse grid.
pub(crate) fn coarse_levels(h: &DistortionFunction, coarse: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=coarse).map(|i| i as f64 / coarse as f64).collect();
    let locs = h.breakpoint_locations();
    if locs.len() <= MAX_STRUCTURED_KNOTS {
        let gap = h.min_gap();
        for &t in &locs {
            v.push(t);
            for d in [gap / 8.0, gap / 64.0] {
                v.push(t - d);
                v.push(t + d);
            }
        }
    }
    sort_dedup(v)
}

/// Scales `2^{-k}` times the smallest breakpoint gap, `k = 3..=20`.
pub(crate) fn epsilon_sweep(h: &DistortionFunction) -> Vec<f64> {
    let gap = h.min_gap();
    (3..=20).map(|k| gap * 0.5f64.powi(k)).collect()
}

/// Interior breakpoints where `h` is discontinuous or changes slope.
pub(crate) fn interior_features(h: &DistortionFunction) -> Vec<f64> {
    let knots = h.knots();
    let n = knots.len();
    let slopes = h.slopes();
    let mut out = Vec::new();
    for j in 1..n - 1 {
        let k = &knots[j];
        let jump = (k.value - k.left).abs() > 1e-12 || (k.value - k.right).abs() > 1e-12;
        let kink = (slopes[j] - slopes[j - 1]).abs() > 1e-12 * (1.0 + slopes[j].abs().max(slopes[j - 1].abs()));
        if jump || kink {
            out.push(k.t);
        }
    }
    out
}
