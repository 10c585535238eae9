//! Exact brute-force law of a policy's pull counts on tiny instances.
//!
//! Rewards branch the tree only when the policy actually consumes them, so a
//! horizon-`n` run visits at most `3^n` paths. All supported policies are
//! deterministic given the observed history, which makes the enumeration
//! exact. Pseudo-regret is reported instead of realized regret: the two have
//! the same expectation and the realized version would branch on
//! counterfactual draws the policy never sees.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::env::{ArmDistribution, Environment, EnvironmentClass};
use crate::policy::{BanditPolicy, BuildContext, PolicyError, PolicySpec};

const MAX_HORIZON: u64 = 12;
const MAX_SUPPORT: usize = 3;
const MAX_NODES: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("exact enumeration supports horizons up to {MAX_HORIZON} (got {0})")]
    HorizonTooLarge(u64),
    #[error("arm {arm} has {size} support points; exact enumeration supports up to {MAX_SUPPORT}")]
    SupportTooLarge { arm: usize, size: usize },
    #[error("arm {arm} has continuous support; exact enumeration needs atomic arms")]
    ContinuousArm { arm: usize },
    #[error("enumeration budget of {MAX_NODES} nodes exceeded")]
    BudgetExceeded,
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// Exact law of the pull-count vector at horizon `n`, plus the exact expected
/// pseudo-regret.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    /// Probability of each reachable pull-count tuple.
    pub pull_law: BTreeMap<Vec<u64>, f64>,
    pub expected_pseudo_regret: f64,
    /// Sum of all path probabilities; one up to rounding.
    pub total_probability: f64,
}

impl ExactDistribution {
    pub fn probability_of(&self, pulls: &[u64]) -> f64 {
        self.pull_law.get(pulls).copied().unwrap_or(0.0)
    }

    /// Marginal law of a single arm's pull count.
    pub fn arm_marginal(&self, arm: usize) -> BTreeMap<u64, f64> {
        let mut out = BTreeMap::new();
        for (pulls, p) in &self.pull_law {
            *out.entry(pulls[arm]).or_insert(0.0) += p;
        }
        out
    }
}

fn support_points(dist: &ArmDistribution, arm: usize) -> Result<Vec<(f64, f64)>, OracleError> {
    let points = match dist {
        ArmDistribution::Bernoulli { p } => {
            let mut v = Vec::new();
            if *p < 1.0 {
                v.push((0.0, 1.0 - p));
            }
            if *p > 0.0 {
                v.push((1.0, *p));
            }
            v
        }
        ArmDistribution::Dirac { x } => vec![(*x, 1.0)],
        ArmDistribution::FiniteSupport { points } => points.clone(),
        ArmDistribution::UniformInterval { .. } => return Err(OracleError::ContinuousArm { arm }),
    };
    if points.len() > MAX_SUPPORT {
        return Err(OracleError::SupportTooLarge {
            arm,
            size: points.len(),
        });
    }
    Ok(points)
}

/// Enumerate every reward realization a policy can encounter up to horizon
/// `n` and return the exact law of its pull counts.
pub fn exact_distribution(
    env: &Environment,
    spec: &PolicySpec,
    class: Option<&Arc<EnvironmentClass>>,
    n: u64,
) -> Result<ExactDistribution, OracleError> {
    if n > MAX_HORIZON {
        return Err(OracleError::HorizonTooLarge(n));
    }
    let supports: Vec<Vec<(f64, f64)>> = env
        .arms()
        .iter()
        .enumerate()
        .map(|(arm, dist)| support_points(dist, arm))
        .collect::<Result<_, _>>()?;

    let mut ctx = BuildContext::new(env.num_arms());
    if let Some(class) = class {
        ctx = ctx.with_class(Arc::clone(class));
    }
    if spec.is_horizon() {
        ctx = ctx.with_horizon(n);
    }
    let policy = spec.build(&ctx)?;

    let mut law = BTreeMap::new();
    let mut nodes = 0u64;
    expand(policy, 1.0, n, &supports, &mut law, &mut nodes)?;

    let gaps = env.gaps();
    let mut expected_pseudo_regret = 0.0;
    let mut total_probability = 0.0;
    for (pulls, p) in &law {
        total_probability += p;
        let pseudo: f64 = pulls
            .iter()
            .zip(&gaps.gaps)
            .map(|(&t, &g)| t as f64 * g)
            .sum();
        expected_pseudo_regret += p * pseudo;
    }
    Ok(ExactDistribution {
        pull_law: law,
        expected_pseudo_regret,
        total_probability,
    })
}

fn expand(
    mut policy: Box<dyn BanditPolicy>,
    path_probability: f64,
    remaining: u64,
    supports: &[Vec<(f64, f64)>],
    law: &mut BTreeMap<Vec<u64>, f64>,
    nodes: &mut u64,
) -> Result<(), OracleError> {
    *nodes += 1;
    if *nodes > MAX_NODES {
        return Err(OracleError::BudgetExceeded);
    }
    if remaining == 0 {
        *law.entry(policy.state().pulls().to_vec()).or_insert(0.0) += path_probability;
        return Ok(());
    }
    let arm = policy.select()?;
    let branches = &supports[arm];
    // The last branch reuses the current policy value instead of cloning.
    for (reward, weight) in &branches[..branches.len() - 1] {
        let mut child = policy.clone();
        child.record(arm, *reward);
        expand(
            child,
            path_probability * weight,
            remaining - 1,
            supports,
            law,
            nodes,
        )?;
    }
    let (reward, weight) = branches[branches.len() - 1];
    policy.record(arm, reward);
    expand(
        policy,
        path_probability * weight,
        remaining - 1,
        supports,
        law,
        nodes,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(literal: &str) -> Environment {
        Environment::parse(literal).unwrap()
    }

    fn spec(literal: &str) -> PolicySpec {
        PolicySpec::parse(literal).unwrap()
    }

    #[test]
    fn all_dirac_arms_give_a_single_path() {
        let e = env("dirac(0.6),dirac(0.5)");
        let d = exact_distribution(&e, &spec("ucb1(0.5)"), None, 6).unwrap();
        assert_eq!(d.pull_law.len(), 1);
        let (pulls, p) = d.pull_law.iter().next().unwrap();
        assert_eq!(*p, 1.0);
        assert_eq!(pulls.iter().sum::<u64>(), 6);
        assert!((d.total_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_bernoullis_match_deterministic_replay() {
        // Ber(1) and Ber(0) are Dirac in disguise: a single path whose
        // pseudo-regret comes from replaying the trajectory.
        let e = env("ber(1),ber(0)");
        let d = exact_distribution(&e, &spec("ucb1(0.5)"), None, 4).unwrap();
        assert_eq!(d.pull_law.len(), 1);
        let replay =
            crate::simulate::run_episode(&e, &spec("ucb1(0.5)"), None, &[4], 0, 0).unwrap();
        let pulls = replay.checkpoints[0].pulls.clone();
        assert_eq!(d.probability_of(&pulls), 1.0);
        assert!((d.expected_pseudo_regret - replay.checkpoints[0].pseudo_regret).abs() < 1e-12);
    }

    #[test]
    fn two_bernoullis_full_enumeration() {
        let e = env("ber(0.6),ber(0.5)");
        let d = exact_distribution(&e, &spec("ucb1(0.5)"), None, 5).unwrap();
        assert!((d.total_probability - 1.0).abs() < 1e-12);
        // After initialization every arm has at least one pull.
        for pulls in d.pull_law.keys() {
            assert_eq!(pulls.iter().sum::<u64>(), 5);
            assert!(pulls.iter().all(|&t| t >= 1));
        }
        assert!(d.expected_pseudo_regret > 0.0);
    }

    #[test]
    fn budget_guards() {
        let e = env("ber(0.6),ber(0.5)");
        assert_eq!(
            exact_distribution(&e, &spec("ucb1(0.5)"), None, 13).unwrap_err(),
            OracleError::HorizonTooLarge(13)
        );
        let wide = env("finite(0:0.25,0.3:0.25,0.6:0.25,1:0.25),ber(0.5)");
        assert!(matches!(
            exact_distribution(&wide, &spec("ucb1(0.5)"), None, 4).unwrap_err(),
            OracleError::SupportTooLarge { arm: 0, size: 4 }
        ));
        let cont = env("unif(0,1),ber(0.5)");
        assert!(matches!(
            exact_distribution(&cont, &spec("ucb1(0.5)"), None, 4).unwrap_err(),
            OracleError::ContinuousArm { arm: 0 }
        ));
    }

    #[test]
    fn enumeration_order_does_not_change_the_law() {
        let e = env("ber(0.6),ber(0.5),ber(0.3)");
        let s = spec("ucb1(0.5)");
        let forward = exact_distribution(&e, &s, None, 6).unwrap();

        // Re-run the expansion with every branch list reversed; each tuple
        // accumulates the same mass in a different order.
        let supports: Vec<Vec<(f64, f64)>> = e
            .arms()
            .iter()
            .enumerate()
            .map(|(arm, d)| {
                let mut pts = support_points(d, arm).unwrap();
                pts.reverse();
                pts
            })
            .collect();
        let policy = s.build(&BuildContext::new(3)).unwrap();
        let mut law = BTreeMap::new();
        let mut nodes = 0;
        expand(policy, 1.0, 6, &supports, &mut law, &mut nodes).unwrap();

        assert_eq!(forward.pull_law.len(), law.len());
        for (pulls, p) in &forward.pull_law {
            let q = law.get(pulls).copied().unwrap();
            assert!((p - q).abs() < 1e-14, "{pulls:?}: {p} vs {q}");
        }
    }
}
