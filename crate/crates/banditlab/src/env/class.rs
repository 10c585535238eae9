//! Finite environment classes: the candidate set a GCL-family policy reasons
//! over, with its per-arm winning subsets and separation constants.

use thiserror::Error;

use super::dist::ArmDistribution;
use super::environment::Environment;
use crate::ks::ks_between;

#[derive(Debug, Error, PartialEq)]
pub enum ClassError {
    #[error("an environment class needs at least one member")]
    Empty,
    #[error("all class members must have the same number of arms (got {0} and {1})")]
    MixedArity(usize, usize),
}

/// A finite set of candidate environments over a fixed number of arms.
///
/// `winning[k]` lists the member indices in which arm `k` is optimal (ties go
/// to the lowest arm index, so every member appears in exactly one subset).
#[derive(Debug, Clone)]
pub struct EnvironmentClass {
    members: Vec<Environment>,
    winning: Vec<Vec<usize>>,
}

impl EnvironmentClass {
    pub fn new(members: Vec<Environment>) -> Result<Self, ClassError> {
        let first = members.first().ok_or(ClassError::Empty)?;
        let num_arms = first.num_arms();
        for m in &members {
            if m.num_arms() != num_arms {
                return Err(ClassError::MixedArity(num_arms, m.num_arms()));
            }
        }
        let mut winning = vec![Vec::new(); num_arms];
        for (i, m) in members.iter().enumerate() {
            winning[m.best_arm()].push(i);
        }
        Ok(Self { members, winning })
    }

    pub fn members(&self) -> &[Environment] {
        &self.members
    }

    pub fn num_members(&self) -> usize {
        self.members.len()
    }

    pub fn num_arms(&self) -> usize {
        self.winning.len()
    }

    /// Member indices in which arm `k` is the optimal arm.
    pub fn winning_members(&self, k: usize) -> &[usize] {
        &self.winning[k]
    }

    /// Whether `env` equals one of the members (same families and parameters).
    pub fn contains(&self, env: &Environment) -> bool {
        self.members.iter().any(|m| m == env)
    }

    pub fn is_all_bernoulli(&self) -> bool {
        self.members.iter().all(|m| m.is_all_bernoulli())
    }

    /// Minimum mean over all members and arms. For an all-Bernoulli class
    /// this is the lower bound on the parameters.
    pub fn min_mean(&self) -> f64 {
        self.members
            .iter()
            .flat_map(|m| m.means().iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from arm `k`'s mean in `env` to its nearest winning
    /// parameter: `inf` over members where `k` wins of the mean difference.
    /// Infinite when no member makes arm `k` optimal.
    pub fn mean_gap(&self, env: &Environment, k: usize) -> f64 {
        self.winning[k]
            .iter()
            .map(|&i| (env.mean(k) - self.members[i].mean(k)).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from arm `k`'s CDF in `env` to its nearest winning CDF in
    /// sup norm. Infinite when no member makes arm `k` optimal.
    pub fn cdf_gap(&self, env: &Environment, k: usize) -> f64 {
        self.winning[k]
            .iter()
            .map(|&i| ks_between(env.arm(k), self.members[i].arm(k)))
            .fold(f64::INFINITY, f64::min)
    }

    /// The winning arm-`k` distributions, one per member of `winning[k]`.
    pub fn winning_distributions(&self, k: usize) -> impl Iterator<Item = &ArmDistribution> {
        self.winning[k].iter().map(move |&i| self.members[i].arm(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(literals: &[&str]) -> EnvironmentClass {
        EnvironmentClass::new(
            literals
                .iter()
                .map(|s| Environment::parse(s).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn winning_sets_partition_the_members() {
        let c = class(&[
            "ber(0.6),ber(0.5)",
            "ber(0.5),ber(0.6)",
            "ber(0.7),ber(0.2)",
        ]);
        assert_eq!(c.winning_members(0), &[0, 2]);
        assert_eq!(c.winning_members(1), &[1]);
        let total: usize = (0..c.num_arms()).map(|k| c.winning_members(k).len()).sum();
        assert_eq!(total, c.num_members());
    }

    #[test]
    fn ties_go_to_the_lowest_arm() {
        let c = class(&["ber(0.5),ber(0.5)"]);
        assert_eq!(c.winning_members(0), &[0]);
        assert!(c.winning_members(1).is_empty());
    }

    #[test]
    fn bernoulli_gap_constants() {
        // In (0.7, 0.5) arm 1 wins; in (0.3, 0.5) arm 2 wins.
        let c = class(&["ber(0.3),ber(0.5)", "ber(0.7),ber(0.5)"]);
        let true_env = Environment::parse("ber(0.7),ber(0.5)").unwrap();
        // Arm 2's winning parameter is 0.5, identical to its true mean.
        assert_eq!(c.mean_gap(&true_env, 1), 0.0);
        // Arm 1's winning parameter is 0.7.
        let other = Environment::parse("ber(0.3),ber(0.5)").unwrap();
        assert!((c.mean_gap(&other, 0) - 0.4).abs() < 1e-15);
        assert!(c.is_all_bernoulli());
        assert!((c.min_mean() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn cdf_gap_matches_mean_gap_for_bernoulli() {
        let c = class(&["ber(0.3),ber(0.5)", "ber(0.7),ber(0.5)"]);
        let env = Environment::parse("ber(0.3),ber(0.5)").unwrap();
        for k in 0..2 {
            let dk = c.mean_gap(&env, k);
            let deltak = c.cdf_gap(&env, k);
            assert!((dk - deltak).abs() < 1e-15, "arm {k}: {dk} vs {deltak}");
        }
    }

    #[test]
    fn empty_winning_set_gives_infinite_gap() {
        let c = class(&["ber(0.6),ber(0.5)"]);
        let env = Environment::parse("ber(0.6),ber(0.5)").unwrap();
        assert!(c.mean_gap(&env, 1).is_infinite());
        assert!(c.cdf_gap(&env, 1).is_infinite());
    }

    #[test]
    fn arity_mismatch_rejected() {
        let members = vec![
            Environment::parse("ber(0.6),ber(0.5)").unwrap(),
            Environment::parse("ber(0.6),ber(0.5),ber(0.4)").unwrap(),
        ];
        assert_eq!(
            EnvironmentClass::new(members).unwrap_err(),
            ClassError::MixedArity(2, 3)
        );
    }
}
