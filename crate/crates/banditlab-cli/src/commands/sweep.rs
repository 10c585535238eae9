//! `sweep`: one UCB family across a grid of exploration parameters.

use std::path::Path;

use anyhow::{Context, Result};

use banditlab::stats::mean_ci;
use banditlab::PolicySpec;

use crate::config::Experiment;
use crate::report;

pub fn run(experiment: &Experiment, out_dir: &Path) -> Result<()> {
    let (family, rhos) = experiment
        .sweep
        .as_ref()
        .context("the config has no [sweep] section")?;

    let policies: Vec<PolicySpec> = rhos
        .iter()
        .map(|&rho| match family.as_str() {
            "ucb1" => Ok(PolicySpec::Ucb1 { rho }),
            "ucbh" => Ok(PolicySpec::UcbH { rho }),
            other => anyhow::bail!("unknown sweep family `{other}`"),
        })
        .collect::<Result<_>>()?;

    let mut sets = Vec::with_capacity(policies.len());
    for spec in &policies {
        sets.push(banditlab::run_monte_carlo(
            &experiment.environment,
            spec,
            experiment.class.as_ref(),
            &experiment.checkpoints,
            experiment.reps,
            experiment.seed,
            experiment.workers,
        )?);
    }

    report::write_file(out_dir, "regret.csv", &report::regret_csv(&sets))?;
    report::write_file(out_dir, "counts.csv", &report::counts_csv(&sets))?;

    for set in &sets {
        for checkpoint in &set.checkpoints {
            let (mean, hw) = mean_ci(&checkpoint.regret)?;
            println!(
                "{policy} n={n}: regret {mean:.4} ± {hw:.4}",
                policy = set.policy,
                n = checkpoint.n
            );
        }
    }
    Ok(())
}
