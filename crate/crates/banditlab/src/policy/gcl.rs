//! Greatest-confidence-level policies over a finite environment class.
//!
//! `gcl` scores each arm by how far its empirical CDF sits from the nearest
//! distribution that would make the arm optimal, in scaled squared sup-norm;
//! it additionally discards candidate environments that are infinitely less
//! likely than some alternative after the first round of draws. `gclb` is
//! the all-Bernoulli specialization, where the CDF distance collapses to a
//! mean distance and no elimination is needed.

use std::sync::Arc;

use crate::env::{density_ratio_zero, ArmDistribution, EnvironmentClass};
use crate::ks::ks_distance_grouped;

use super::{argmin_lowest, BanditPolicy, PolicyError, PolicySpec, PolicyState};

/// Sorted multiset of observed rewards for one arm.
#[derive(Debug, Clone, Default)]
struct ObsMultiset {
    grouped: Vec<(f64, u64)>,
    total: u64,
}

impl ObsMultiset {
    fn insert(&mut self, value: f64) {
        match self
            .grouped
            .binary_search_by(|(v, _)| v.partial_cmp(&value).unwrap())
        {
            Ok(i) => self.grouped[i].1 += 1,
            Err(i) => self.grouped.insert(i, (value, 1)),
        }
        self.total += 1;
    }
}

/// Scaled squared sup-norm distance from the empirical CDF to the nearest
/// candidate distribution: `pulls * inf_candidates ||F_hat - F||^2`. An empty
/// candidate set yields `+inf` (the arm is optimal in no surviving
/// environment).
pub fn gcl_index<'a>(
    pulls: u64,
    grouped_obs: &[(f64, u64)],
    candidates: impl Iterator<Item = &'a ArmDistribution>,
) -> f64 {
    let best = candidates
        .map(|dist| ks_distance_grouped(grouped_obs, pulls, dist))
        .fold(f64::INFINITY, f64::min);
    if best.is_infinite() {
        f64::INFINITY
    } else {
        pulls as f64 * best * best
    }
}

/// Bernoulli specialization: `pulls * min_params (param - mean)^2`, `+inf`
/// when no parameter makes the arm optimal.
pub fn gclb_index(pulls: u64, mean: f64, winning_params: &[f64]) -> f64 {
    let best = winning_params
        .iter()
        .map(|p| (p - mean).abs())
        .fold(f64::INFINITY, f64::min);
    if best.is_infinite() {
        f64::INFINITY
    } else {
        pulls as f64 * best * best
    }
}

#[derive(Clone)]
pub struct Gcl {
    class: Arc<EnvironmentClass>,
    state: PolicyState,
    observations: Vec<ObsMultiset>,
    first_rewards: Vec<Option<f64>>,
    /// Candidate environments still considered possible.
    active: Vec<bool>,
    elimination_done: bool,
    /// Set when the first-round test discarded every member, in which case
    /// the full class is restored.
    elimination_emptied: bool,
}

impl Gcl {
    pub fn new(class: Arc<EnvironmentClass>, num_arms: usize) -> Self {
        debug_assert_eq!(class.num_arms(), num_arms);
        let members = class.num_members();
        Self {
            class,
            state: PolicyState::new(num_arms),
            observations: vec![ObsMultiset::default(); num_arms],
            first_rewards: vec![None; num_arms],
            active: vec![true; members],
            elimination_done: false,
            elimination_emptied: false,
        }
    }

    /// Whether the one-shot elimination discarded every candidate. The policy
    /// then falls back to the full class.
    pub fn elimination_emptied(&self) -> bool {
        self.elimination_emptied
    }

    pub fn active_members(&self) -> &[bool] {
        &self.active
    }

    /// Discard every member that some alternative makes infinitely more
    /// likely given the first observation of some arm. Runs exactly once,
    /// right after the initialization rounds.
    fn eliminate(&mut self) {
        let members = self.class.members();
        let first: Vec<f64> = self
            .first_rewards
            .iter()
            .map(|r| r.expect("every arm pulled once before elimination"))
            .collect();
        let mut keep = vec![true; members.len()];
        for (i, candidate) in members.iter().enumerate() {
            'search: for alternative in members {
                for (arm, &x) in first.iter().enumerate() {
                    if density_ratio_zero(candidate.arm(arm), alternative.arm(arm), x) {
                        keep[i] = false;
                        break 'search;
                    }
                }
            }
        }
        if keep.iter().any(|&k| k) {
            self.active = keep;
        } else {
            self.elimination_emptied = true;
            self.active = vec![true; members.len()];
        }
        self.elimination_done = true;
    }

    fn index(&self, arm: usize) -> f64 {
        let obs = &self.observations[arm];
        let candidates = self
            .class
            .winning_members(arm)
            .iter()
            .filter(|&&i| self.active[i])
            .map(|&i| self.class.members()[i].arm(arm));
        gcl_index(self.state.pull_count(arm), &obs.grouped, candidates)
    }
}

impl BanditPolicy for Gcl {
    fn canonical(&self) -> String {
        PolicySpec::Gcl.canonical()
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        let t = self.state.round();
        let k = self.state.num_arms() as u64;
        if t <= k {
            return Ok((t - 1) as usize);
        }
        if !self.elimination_done {
            self.eliminate();
        }
        Ok(argmin_lowest(
            (0..self.state.num_arms()).map(|arm| self.index(arm)),
        ))
    }

    fn record(&mut self, arm: usize, reward: f64) {
        self.state.record(arm, reward);
        self.observations[arm].insert(reward);
        self.first_rewards[arm].get_or_insert(reward);
    }

    fn state(&self) -> &PolicyState {
        &self.state
    }

    fn clone_box(&self) -> Box<dyn BanditPolicy> {
        Box::new(self.clone())
    }
}

#[derive(Clone)]
pub struct GclB {
    state: PolicyState,
    /// Winning Bernoulli parameters per arm.
    winning_params: Vec<Vec<f64>>,
}

impl GclB {
    pub fn new(class: Arc<EnvironmentClass>, num_arms: usize) -> Result<Self, PolicyError> {
        debug_assert_eq!(class.num_arms(), num_arms);
        if !class.is_all_bernoulli() || class.min_mean() <= 0.0 {
            return Err(PolicyError::ClassNotBernoulli);
        }
        let winning_params = (0..num_arms)
            .map(|k| class.winning_distributions(k).map(|d| d.mean()).collect())
            .collect();
        Ok(Self {
            state: PolicyState::new(num_arms),
            winning_params,
        })
    }
}

impl BanditPolicy for GclB {
    fn canonical(&self) -> String {
        PolicySpec::GclB.canonical()
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        let t = self.state.round();
        let k = self.state.num_arms() as u64;
        if t <= k {
            return Ok((t - 1) as usize);
        }
        let state = &self.state;
        Ok(argmin_lowest((0..state.num_arms()).map(|arm| {
            gclb_index(
                state.pull_count(arm),
                state.mean(arm),
                &self.winning_params[arm],
            )
        })))
    }

    fn record(&mut self, arm: usize, reward: f64) {
        self.state.record(arm, reward);
    }

    fn state(&self) -> &PolicyState {
        &self.state
    }

    fn clone_box(&self) -> Box<dyn BanditPolicy> {
        Box::new(self.clone())
    }
}
