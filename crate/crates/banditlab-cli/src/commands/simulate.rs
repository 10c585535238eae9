//! `simulate`: Monte Carlo regret and pull-count data.

use std::path::Path;

use anyhow::Result;

use banditlab::stats::{f_tail_check, mean_ci};

use crate::config::Experiment;
use crate::report;

pub fn run(experiment: &Experiment, out_dir: &Path) -> Result<()> {
    let sets = super::run_all(experiment)?;

    report::write_file(out_dir, "regret.csv", &report::regret_csv(&sets))?;
    report::write_file(out_dir, "counts.csv", &report::counts_csv(&sets))?;

    if experiment.stats.mean {
        for set in &sets {
            for checkpoint in &set.checkpoints {
                let (regret, regret_hw) = mean_ci(&checkpoint.regret)?;
                let (pseudo, pseudo_hw) = mean_ci(&checkpoint.pseudo_regret)?;
                println!(
                    "{policy} n={n}: regret {regret:.4} ± {regret_hw:.4}, \
                     pseudo-regret {pseudo:.4} ± {pseudo_hw:.4}",
                    policy = set.policy,
                    n = checkpoint.n,
                );
            }
        }
    }

    if let Some(params) = experiment.stats.f_check {
        let reports = sets
            .iter()
            .map(|set| Ok(f_tail_check(set, &experiment.environment, params)?))
            .collect::<Result<Vec<_>>>()?;
        report::write_file(out_dir, "fcheck.csv", &report::fcheck_csv(&reports))?;
        for r in &reports {
            let verdict = if r.all_pass() { "pass" } else { "fail" };
            println!(
                "f-check {policy}: C={c}, C~={ct}, f={law}: {verdict}",
                policy = r.policy,
                c = params.c,
                ct = params.c_tilde,
                law = params.law.label(),
            );
        }
    }
    Ok(())
}
