//! Episode execution and replicated Monte Carlo runs.
//!
//! Replications are embarrassingly parallel: each episode derives its reward
//! streams from `(base seed, replication)` alone and owns its policy state,
//! so a run's output is bit-identical for any worker count.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::env::{Environment, EnvironmentClass, RewardStream};
use crate::policy::{BuildContext, PolicyError, PolicySpec};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("checkpoints must be strictly increasing")]
    UnsortedCheckpoints,
    #[error("need at least one checkpoint")]
    NoCheckpoints,
    #[error("checkpoint {checkpoint} is below the number of arms {num_arms}")]
    CheckpointBelowArms { checkpoint: u64, num_arms: usize },
    #[error("a horizon policy must be run for exactly one checkpoint (its horizon), got {0}")]
    HorizonNeedsSingleCheckpoint(usize),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// Per-checkpoint outcome of a single episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub n: u64,
    /// Pull counts per arm at round `n`; they sum to `n`.
    pub pulls: Vec<u64>,
    /// Realized regret: the best arm's full reward prefix minus the rewards
    /// actually collected. May be negative.
    pub regret: f64,
    /// Gap-weighted pull counts; always nonnegative.
    pub pseudo_regret: f64,
}

/// One episode's checkpoints plus the seed it derived its streams from.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub episode_seed: u64,
    pub checkpoints: Vec<Checkpoint>,
}

/// Monte Carlo samples of one `(policy, environment)` pair.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub policy: String,
    pub env_id: String,
    pub num_arms: usize,
    pub base_seed: u64,
    pub reps: u64,
    pub checkpoints: Vec<CheckpointSamples>,
}

/// Sample vectors across replications at one checkpoint.
#[derive(Debug, Clone)]
pub struct CheckpointSamples {
    pub n: u64,
    pub regret: Vec<f64>,
    pub pseudo_regret: Vec<f64>,
    /// Row-major `[replication][arm]` pull counts.
    pub pulls: Vec<u64>,
}

impl CheckpointSamples {
    pub fn pulls_of(&self, replication: usize, num_arms: usize) -> &[u64] {
        &self.pulls[replication * num_arms..(replication + 1) * num_arms]
    }

    /// Pull counts of a single arm across replications.
    pub fn arm_pulls(&self, arm: usize, num_arms: usize) -> impl Iterator<Item = u64> + '_ {
        self.pulls.iter().skip(arm).step_by(num_arms).copied()
    }
}

impl SampleSet {
    pub fn checkpoint(&self, n: u64) -> Option<&CheckpointSamples> {
        self.checkpoints.iter().find(|c| c.n == n)
    }

    /// Canonical byte serialization (for hashing and change detection).
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(self.policy.as_bytes());
        out.push(0);
        out.extend_from_slice(self.env_id.as_bytes());
        out.push(0);
        out.extend_from_slice(&(self.num_arms as u64).to_le_bytes());
        out.extend_from_slice(&self.base_seed.to_le_bytes());
        out.extend_from_slice(&self.reps.to_le_bytes());
        for c in &self.checkpoints {
            out.extend_from_slice(&c.n.to_le_bytes());
            for x in &c.regret {
                out.extend_from_slice(&x.to_bits().to_le_bytes());
            }
            for x in &c.pseudo_regret {
                out.extend_from_slice(&x.to_bits().to_le_bytes());
            }
            for p in &c.pulls {
                out.extend_from_slice(&p.to_le_bytes());
            }
        }
        out
    }
}

fn validate_checkpoints(
    checkpoints: &[u64],
    num_arms: usize,
    spec: &PolicySpec,
) -> Result<(), SimError> {
    if checkpoints.is_empty() {
        return Err(SimError::NoCheckpoints);
    }
    if !checkpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(SimError::UnsortedCheckpoints);
    }
    if (checkpoints[0] as usize) < num_arms {
        return Err(SimError::CheckpointBelowArms {
            checkpoint: checkpoints[0],
            num_arms,
        });
    }
    if spec.is_horizon() && checkpoints.len() != 1 {
        return Err(SimError::HorizonNeedsSingleCheckpoint(checkpoints.len()));
    }
    Ok(())
}

/// Play a single episode up to the last checkpoint.
///
/// At each round the policy consumes the next element of the chosen arm's
/// stream. The regret at a checkpoint compares the collected rewards with the
/// full prefix of the best arm's stream; the best arm's pulls and its
/// counterfactual prefix read the same stream, so a policy that only ever
/// pulls the best arm has exactly zero regret.
pub fn run_episode(
    env: &Environment,
    spec: &PolicySpec,
    class: Option<&Arc<EnvironmentClass>>,
    checkpoints: &[u64],
    base_seed: u64,
    replication: u64,
) -> Result<EpisodeResult, SimError> {
    validate_checkpoints(checkpoints, env.num_arms(), spec)?;
    let mut ctx = BuildContext::new(env.num_arms());
    if let Some(class) = class {
        ctx = ctx.with_class(Arc::clone(class));
    }
    if spec.is_horizon() {
        ctx = ctx.with_horizon(checkpoints[0]);
    }
    let mut policy = spec.build(&ctx)?;

    let episode_seed = crate::env::episode_seed(base_seed, replication);
    let mut streams: Vec<RewardStream> = env
        .arms()
        .iter()
        .enumerate()
        .map(|(arm, dist)| RewardStream::with_episode_seed(dist.clone(), episode_seed, arm))
        .collect();

    let gaps = env.gaps();
    let best = gaps.best_arm;
    let horizon = *checkpoints.last().unwrap() as usize;
    let mut results = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = 0;
    let mut collected = 0.0f64;
    let mut pulls = vec![0u64; env.num_arms()];

    for t in 1..=horizon {
        let arm = policy.select()?;
        let reward = streams[arm].reward(pulls[arm] as usize);
        pulls[arm] += 1;
        collected += reward;
        policy.record(arm, reward);

        if checkpoints[next_checkpoint] == t as u64 {
            let counterfactual = streams[best].prefix_sum(t);
            let pseudo_regret: f64 = pulls
                .iter()
                .zip(&gaps.gaps)
                .map(|(&p, &g)| p as f64 * g)
                .sum();
            results.push(Checkpoint {
                n: t as u64,
                pulls: pulls.clone(),
                regret: counterfactual - collected,
                pseudo_regret,
            });
            next_checkpoint += 1;
        }
    }
    debug_assert_eq!(next_checkpoint, checkpoints.len());
    Ok(EpisodeResult {
        episode_seed,
        checkpoints: results,
    })
}

/// Run `reps` independent replications and gather the samples.
///
/// Anytime policies traverse all checkpoints within one trajectory; horizon
/// policies are re-run from scratch per checkpoint, with the horizon injected.
/// `workers = 0` uses the global thread pool.
pub fn run_monte_carlo(
    env: &Environment,
    spec: &PolicySpec,
    class: Option<&Arc<EnvironmentClass>>,
    checkpoints: &[u64],
    reps: u64,
    base_seed: u64,
    workers: usize,
) -> Result<SampleSet, SimError> {
    if spec.is_horizon() && checkpoints.len() > 1 {
        // Re-run per horizon and merge, keeping the per-run layout.
        let mut merged: Vec<CheckpointSamples> = Vec::with_capacity(checkpoints.len());
        for &n in checkpoints {
            let single = run_monte_carlo(env, spec, class, &[n], reps, base_seed, workers)?;
            merged.extend(single.checkpoints);
        }
        return Ok(SampleSet {
            policy: spec.canonical(),
            env_id: env.id(),
            num_arms: env.num_arms(),
            base_seed,
            reps,
            checkpoints: merged,
        });
    }

    validate_checkpoints(checkpoints, env.num_arms(), spec)?;
    let episodes = run_in_pool(workers, || {
        (0..reps)
            .into_par_iter()
            .map(|r| run_episode(env, spec, class, checkpoints, base_seed, r))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let num_arms = env.num_arms();
    let checkpoints_out = checkpoints
        .iter()
        .enumerate()
        .map(|(ci, &n)| {
            let mut samples = CheckpointSamples {
                n,
                regret: Vec::with_capacity(reps as usize),
                pseudo_regret: Vec::with_capacity(reps as usize),
                pulls: Vec::with_capacity(reps as usize * num_arms),
            };
            for episode in &episodes {
                let c = &episode.checkpoints[ci];
                samples.regret.push(c.regret);
                samples.pseudo_regret.push(c.pseudo_regret);
                samples.pulls.extend_from_slice(&c.pulls);
            }
            samples
        })
        .collect();

    Ok(SampleSet {
        policy: spec.canonical(),
        env_id: env.id(),
        num_arms,
        base_seed,
        reps,
        checkpoints: checkpoints_out,
    })
}

fn run_in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("building a local thread pool");
        pool.install(job)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Environment;

    fn env(literal: &str) -> Environment {
        Environment::parse(literal).unwrap()
    }

    fn spec(literal: &str) -> PolicySpec {
        PolicySpec::parse(literal).unwrap()
    }

    #[test]
    fn forced_initialization_on_dirac_arms() {
        let e = env("dirac(0.6),dirac(0.5)");
        let r = run_episode(&e, &spec("ucb1(0.5)"), None, &[2], 1, 0).unwrap();
        let c = &r.checkpoints[0];
        assert_eq!(c.pulls, vec![1, 1]);
        assert!((c.regret - 0.1).abs() < 1e-12);
        assert!((c.pseudo_regret - 0.1).abs() < 1e-12);
    }

    #[test]
    fn deterministic_env_matches_direct_replay() {
        // With Dirac arms the whole trajectory is computable by recursion on
        // the index formula, independent of the simulator.
        let e = env("dirac(0.6),dirac(0.5)");
        let n = 100u64;
        let r = run_episode(&e, &spec("ucb1(0.5)"), None, &[n], 9, 4).unwrap();
        let c = &r.checkpoints[0];

        let mut pulls = [1u64, 1u64]; // forced initialization
        for t in 3..=n {
            let idx =
                |arm: usize| [0.6, 0.5][arm] + (0.5 * (t as f64).ln() / pulls[arm] as f64).sqrt();
            let arm = if idx(0) >= idx(1) { 0 } else { 1 };
            pulls[arm] += 1;
        }
        assert_eq!(c.pulls, pulls.to_vec());
        assert!((c.pseudo_regret - 0.1 * pulls[1] as f64).abs() < 1e-9);
        assert!((c.regret - 0.1 * pulls[1] as f64).abs() < 1e-9);
    }

    #[test]
    fn equal_dirac_arms_have_exactly_zero_regret() {
        let e = env("dirac(0.5),dirac(0.5)");
        for literal in ["ucb1(0.5)", "gclstar(0.5)"] {
            let r = run_episode(&e, &spec(literal), None, &[50], 3, 7).unwrap();
            assert_eq!(r.checkpoints[0].regret, 0.0);
            assert_eq!(r.checkpoints[0].pseudo_regret, 0.0);
        }
    }

    #[test]
    fn pulls_sum_to_n_and_grow_monotonically() {
        let e = env("ber(0.6),ber(0.5),ber(0.4)");
        let r = run_episode(&e, &spec("ucb1(0.5)"), None, &[3, 10, 40, 100], 11, 2).unwrap();
        let mut previous = vec![0u64; 3];
        for c in &r.checkpoints {
            assert_eq!(c.pulls.iter().sum::<u64>(), c.n);
            assert!(c
                .pulls
                .iter()
                .zip(&previous)
                .all(|(now, before)| now >= before));
            assert!(c.pseudo_regret >= 0.0);
            previous = c.pulls.clone();
        }
    }

    #[test]
    fn checkpoint_validation() {
        let e = env("ber(0.6),ber(0.5)");
        assert_eq!(
            run_episode(&e, &spec("ucb1(0.5)"), None, &[1], 0, 0).unwrap_err(),
            SimError::CheckpointBelowArms {
                checkpoint: 1,
                num_arms: 2
            }
        );
        assert_eq!(
            run_episode(&e, &spec("ucb1(0.5)"), None, &[10, 10], 0, 0).unwrap_err(),
            SimError::UnsortedCheckpoints
        );
        assert_eq!(
            run_episode(&e, &spec("ucbh(0.5)"), None, &[10, 20], 0, 0).unwrap_err(),
            SimError::HorizonNeedsSingleCheckpoint(2)
        );
        assert!(run_episode(&e, &spec("ucbh(0.5)"), None, &[10], 0, 0).is_ok());
    }

    #[test]
    fn monte_carlo_with_one_rep_reduces_to_run_episode() {
        let e = env("ber(0.6),ber(0.5)");
        let s = spec("ucb1(0.5)");
        let mc = run_monte_carlo(&e, &s, None, &[50], 1, 5, 1).unwrap();
        let ep = run_episode(&e, &s, None, &[50], 5, 0).unwrap();
        assert_eq!(mc.checkpoints[0].regret[0], ep.checkpoints[0].regret);
        assert_eq!(mc.checkpoints[0].pulls, ep.checkpoints[0].pulls);
    }

    #[test]
    fn worker_count_does_not_change_the_samples() {
        let e = env("ber(0.6),ber(0.5)");
        let s = spec("ucb1(0.5)");
        let one = run_monte_carlo(&e, &s, None, &[100], 200, 42, 1).unwrap();
        let eight = run_monte_carlo(&e, &s, None, &[100], 200, 42, 8).unwrap();
        assert_eq!(one.canonical_bytes(), eight.canonical_bytes());
    }

    #[test]
    fn horizon_policy_reruns_per_checkpoint() {
        let e = env("ber(0.6),ber(0.5)");
        let s = spec("ucbh(0.5)");
        let merged = run_monte_carlo(&e, &s, None, &[50, 100], 50, 7, 1).unwrap();
        let at_50 = run_monte_carlo(&e, &s, None, &[50], 50, 7, 1).unwrap();
        let at_100 = run_monte_carlo(&e, &s, None, &[100], 50, 7, 1).unwrap();
        assert_eq!(merged.checkpoints[0].pulls, at_50.checkpoints[0].pulls);
        assert_eq!(merged.checkpoints[1].pulls, at_100.checkpoints[0].pulls);
    }

    #[test]
    fn horizon_matches_anytime_on_separated_dirac_arms() {
        // Dirac arms whose gaps exceed the largest possible exploration
        // bonus sqrt(rho ln n): swapping ln t for ln n changes no argmax, so
        // the trajectories coincide and only the best arm is pulled after
        // initialization.
        let e = env("dirac(0.9),dirac(0.3),dirac(0.05)");
        let n = 50u64;
        for rho in ["0", "0.05"] {
            let anytime =
                run_episode(&e, &spec(&format!("ucb1({rho})")), None, &[n], 1, 0).unwrap();
            let horizon =
                run_episode(&e, &spec(&format!("ucbh({rho})")), None, &[n], 1, 0).unwrap();
            assert_eq!(anytime.checkpoints[0].pulls, horizon.checkpoints[0].pulls);
            assert_eq!(anytime.checkpoints[0].pulls, vec![48, 1, 1]);
        }
    }
}
