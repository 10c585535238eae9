//! Greatest-confidence-level policies for a known best mean: the
//! positive-part squared index and its Chernoff (Bernoulli-KL) refinement.

use super::kl::bern_kl_unchecked;
use super::{argmin_lowest, BanditPolicy, PolicyError, PolicySpec, PolicyState};

/// `pulls * max(mu_star - mean, 0)^2`: zero as soon as the empirical mean
/// reaches the known best mean, since overshooting is no evidence against an
/// arm being optimal.
pub fn gclstar_index(mean: f64, pulls: f64, mu_star: f64) -> f64 {
    let short = (mu_star - mean).max(0.0);
    pulls * short * short
}

/// `pulls * K(min(mean, mu_star), mu_star)` with `K` the Bernoulli
/// Kullback-Leibler divergence.
pub fn gclstar_kl_index(mean: f64, pulls: f64, mu_star: f64) -> f64 {
    pulls * bern_kl_unchecked(mean.min(mu_star), mu_star)
}

#[derive(Debug, Clone)]
pub struct GclStar {
    mu_star: f64,
    state: PolicyState,
}

impl GclStar {
    pub fn new(mu_star: f64, num_arms: usize) -> Result<Self, PolicyError> {
        if !(mu_star.is_finite() && (0.0..=1.0).contains(&mu_star)) {
            return Err(PolicyError::BadMuStar {
                mu_star,
                expected: "[0, 1]",
            });
        }
        Ok(Self {
            mu_star,
            state: PolicyState::new(num_arms),
        })
    }
}

impl BanditPolicy for GclStar {
    fn canonical(&self) -> String {
        PolicySpec::GclStar {
            mu_star: self.mu_star,
        }
        .canonical()
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        let t = self.state.round();
        if t <= self.state.num_arms() as u64 {
            return Ok((t - 1) as usize);
        }
        let state = &self.state;
        Ok(argmin_lowest((0..state.num_arms()).map(|arm| {
            gclstar_index(state.mean(arm), state.pull_count(arm) as f64, self.mu_star)
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

#[derive(Debug, Clone)]
pub struct GclStarKl {
    mu_star: f64,
    state: PolicyState,
}

impl GclStarKl {
    pub fn new(mu_star: f64, num_arms: usize) -> Result<Self, PolicyError> {
        // The KL reference must stay strictly inside (0, 1).
        if !(mu_star.is_finite() && mu_star > 0.0 && mu_star < 1.0) {
            return Err(PolicyError::BadMuStar {
                mu_star,
                expected: "(0, 1)",
            });
        }
        Ok(Self {
            mu_star,
            state: PolicyState::new(num_arms),
        })
    }
}

impl BanditPolicy for GclStarKl {
    fn canonical(&self) -> String {
        PolicySpec::GclStarKl {
            mu_star: self.mu_star,
        }
        .canonical()
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        let t = self.state.round();
        if t <= self.state.num_arms() as u64 {
            return Ok((t - 1) as usize);
        }
        let state = &self.state;
        Ok(argmin_lowest((0..state.num_arms()).map(|arm| {
            gclstar_kl_index(state.mean(arm), state.pull_count(arm) as f64, self.mu_star)
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
