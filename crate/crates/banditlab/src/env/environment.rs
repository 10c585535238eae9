//! Bandit environments: a tuple of arms with derived gap structure.

use std::fmt;

use thiserror::Error;

use super::dist::{ArmDistribution, DistError};

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("an environment needs at least two arms (got {0})")]
    TooFewArms(usize),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("cannot parse environment literal `{0}`")]
    BadLiteral(String),
}

/// Gap structure of an environment: best arm, best mean, and per-arm
/// suboptimality gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaps {
    /// Lowest index attaining the maximal mean.
    pub best_arm: usize,
    pub best_mean: f64,
    /// `best_mean - mean_k` per arm; zero at the best arm.
    pub gaps: Vec<f64>,
    /// Minimum gap over arms other than the best one.
    pub min_gap: f64,
    /// Set when two arms tie for the best mean.
    pub degenerate: bool,
}

/// A `K`-tuple of reward distributions (`K >= 2`) with precomputed means and
/// gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    arms: Vec<ArmDistribution>,
    means: Vec<f64>,
    gaps: Gaps,
}

impl Environment {
    pub fn new(arms: Vec<ArmDistribution>) -> Result<Self, EnvError> {
        if arms.len() < 2 {
            return Err(EnvError::TooFewArms(arms.len()));
        }
        let means: Vec<f64> = arms.iter().map(|a| a.mean()).collect();
        let gaps = compute_gaps(&means);
        Ok(Self { arms, means, gaps })
    }

    /// Parse a comma-separated list of distribution literals.
    pub fn parse(literal: &str) -> Result<Self, EnvError> {
        let arms = split_arm_literals(literal)
            .ok_or_else(|| EnvError::BadLiteral(literal.to_string()))?
            .into_iter()
            .map(ArmDistribution::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(arms)
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[ArmDistribution] {
        &self.arms
    }

    pub fn arm(&self, k: usize) -> &ArmDistribution {
        &self.arms[k]
    }

    pub fn mean(&self, k: usize) -> f64 {
        self.means[k]
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn gaps(&self) -> &Gaps {
        &self.gaps
    }

    pub fn best_arm(&self) -> usize {
        self.gaps.best_arm
    }

    pub fn is_all_bernoulli(&self) -> bool {
        self.arms
            .iter()
            .all(|a| matches!(a, ArmDistribution::Bernoulli { .. }))
    }

    /// Canonical identifier: the arm literals joined by commas.
    pub fn id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, arm) in self.arms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{arm}")?;
        }
        Ok(())
    }
}

fn compute_gaps(means: &[f64]) -> Gaps {
    let mut best_arm = 0;
    for (k, &m) in means.iter().enumerate() {
        if m > means[best_arm] {
            best_arm = k;
        }
    }
    let best_mean = means[best_arm];
    let gaps: Vec<f64> = means.iter().map(|m| best_mean - m).collect();
    let min_gap = gaps
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != best_arm)
        .map(|(_, g)| *g)
        .fold(f64::INFINITY, f64::min);
    Gaps {
        best_arm,
        best_mean,
        degenerate: min_gap == 0.0,
        gaps,
        min_gap,
    }
}

/// Split `ber(0.6),unif(0.1,0.3),finite(0:0.5,1:0.5)` at top-level commas.
fn split_arm_literals(s: &str) -> Option<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    out.push(&s[start..]);
    Some(out)
}
