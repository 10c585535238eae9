//! Subcommand implementations.

pub mod simulate;
pub mod sweep;
pub mod tail;
pub mod verify;

use anyhow::Result;

use banditlab::run_monte_carlo;
use banditlab::simulate::SampleSet;

use crate::config::Experiment;

/// Run every policy of the experiment and collect its samples.
pub fn run_all(experiment: &Experiment) -> Result<Vec<SampleSet>> {
    experiment
        .policies
        .iter()
        .map(|spec| {
            Ok(run_monte_carlo(
                &experiment.environment,
                spec,
                experiment.class.as_ref(),
                &experiment.checkpoints,
                experiment.reps,
                experiment.seed,
                experiment.workers,
            )?)
        })
        .collect()
}
