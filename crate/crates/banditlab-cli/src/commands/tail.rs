//! `tail`: empirical tail distributions and smoothed densities of the regret.

use std::path::Path;

use anyhow::Result;

use banditlab::stats::{smoothed_pmf, tail_curve, PmfEstimate, TailCurve};

use crate::config::Experiment;
use crate::report;

pub fn run(experiment: &Experiment, out_dir: &Path, svg: bool) -> Result<()> {
    let sets = super::run_all(experiment)?;

    let mut curves: Vec<(String, String, u64, TailCurve)> = Vec::new();
    let mut pmfs: Vec<(String, String, u64, PmfEstimate)> = Vec::new();

    for set in &sets {
        for checkpoint in &set.checkpoints {
            let thresholds = match &experiment.stats.tail_thresholds {
                Some(t) => t.clone(),
                None => auto_thresholds(experiment, checkpoint.n, &checkpoint.regret),
            };
            curves.push((
                set.policy.clone(),
                set.env_id.clone(),
                checkpoint.n,
                tail_curve(&checkpoint.regret, &thresholds)?,
            ));
            pmfs.push((
                set.policy.clone(),
                set.env_id.clone(),
                checkpoint.n,
                smoothed_pmf(&checkpoint.regret, experiment.stats.pmf_bandwidth)?,
            ));
        }
    }

    report::write_file(out_dir, "tail.csv", &report::tail_csv(&curves))?;
    report::write_file(out_dir, "pmf.csv", &report::pmf_csv(&pmfs))?;
    if svg {
        let title = format!("regret tail, {}", experiment.environment.id());
        report::write_file(out_dir, "tail.svg", &report::tail_svg(&curves, &title))?;
    }
    Ok(())
}

/// Default grid: 51 evenly spaced thresholds on `[0, n * gap]`, falling back
/// to the sample range when the environment is degenerate.
fn auto_thresholds(experiment: &Experiment, n: u64, samples: &[f64]) -> Vec<f64> {
    let gaps = experiment.environment.gaps();
    let hi = if gaps.min_gap > 0.0 {
        n as f64 * gaps.min_gap
    } else {
        samples.iter().cloned().fold(1.0f64, f64::max)
    };
    (0..=50).map(|i| i as f64 * hi / 50.0).collect()
}
