//! Exact Kolmogorov-Smirnov (sup-norm) distances between CDFs on `[0, 1]`.
//!
//! Both functions here are exact, not grid approximations: between two
//! consecutive breakpoints every CDF involved is affine, so the supremum of
//! the difference is attained at a breakpoint or at a left limit of one.

use crate::env::ArmDistribution;

/// Sup-norm distance between the empirical CDF of `sorted_obs` and the CDF of
/// `dist`, evaluated over the merged breakpoint set with left limits at every
/// discontinuity of either function.
pub fn ks_distance(sorted_obs: &[f64], dist: &ArmDistribution) -> f64 {
    assert!(!sorted_obs.is_empty(), "need at least one observation");
    debug_assert!(sorted_obs.windows(2).all(|w| w[0] <= w[1]));
    let mut grouped = Vec::with_capacity(sorted_obs.len());
    let mut i = 0;
    while i < sorted_obs.len() {
        let v = sorted_obs[i];
        let mut count = 0u64;
        while i < sorted_obs.len() && sorted_obs[i] == v {
            count += 1;
            i += 1;
        }
        grouped.push((v, count));
    }
    ks_distance_grouped(&grouped, sorted_obs.len() as u64, dist)
}

/// Same as [`ks_distance`] on observations given as sorted `(value, count)`
/// pairs. This is the form the GCL policy maintains incrementally.
pub fn ks_distance_grouped(grouped_obs: &[(f64, u64)], total: u64, dist: &ArmDistribution) -> f64 {
    assert!(total > 0, "need at least one observation");
    debug_assert_eq!(grouped_obs.iter().map(|(_, c)| c).sum::<u64>(), total);
    let n = total as f64;

    let mut points = dist.breakpoints();
    points.extend(grouped_obs.iter().map(|(v, _)| *v));
    points.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();

    let mut best = 0.0f64;
    let mut obs_idx = 0;
    let mut below = 0u64; // observations strictly below the current point
    for &x in &points {
        let f_left = dist.cdf_left(x);
        let emp_left = below as f64 / n;
        best = best.max((emp_left - f_left).abs());

        let mut at = 0u64;
        if obs_idx < grouped_obs.len() && grouped_obs[obs_idx].0 == x {
            at = grouped_obs[obs_idx].1;
            obs_idx += 1;
        }
        below += at;
        let f_at = dist.cdf(x);
        let emp_at = below as f64 / n;
        best = best.max((emp_at - f_at).abs());
    }
    best
}

/// Sup-norm distance between the CDFs of two model distributions.
pub fn ks_between(a: &ArmDistribution, b: &ArmDistribution) -> f64 {
    let mut points = a.breakpoints();
    points.extend(b.breakpoints());
    points.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    points.dedup();
    let mut best = 0.0f64;
    for &x in &points {
        best = best.max((a.cdf_left(x) - b.cdf_left(x)).abs());
        best = best.max((a.cdf(x) - b.cdf(x)).abs());
    }
    best
}
