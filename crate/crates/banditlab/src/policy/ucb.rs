//! Upper-confidence-bound policies: the anytime `ucb1(rho)` and the horizon
//! variant `ucbh(rho)`.

use super::{argmax_lowest, BanditPolicy, PolicyError, PolicySpec, PolicyState};

/// `mean + sqrt(rho * ln(tau) / pulls)`. For the anytime variant `tau` is the
/// current round; the horizon variant plugs in the total number of rounds.
pub fn ucb_index(mean: f64, pulls: f64, tau: f64, rho: f64) -> f64 {
    mean + (rho * tau.ln() / pulls).sqrt()
}

fn validate_rho(rho: f64) -> Result<(), PolicyError> {
    // rho = 0 (pure greedy) is accepted as an extension for exploration
    // sweeps; the standard definitions require rho > 0.
    if rho.is_finite() && rho >= 0.0 {
        Ok(())
    } else {
        Err(PolicyError::BadRho { rho })
    }
}

#[derive(Debug, Clone)]
pub struct Ucb1 {
    rho: f64,
    state: PolicyState,
}

impl Ucb1 {
    pub fn new(rho: f64, num_arms: usize) -> Result<Self, PolicyError> {
        validate_rho(rho)?;
        Ok(Self {
            rho,
            state: PolicyState::new(num_arms),
        })
    }
}

impl BanditPolicy for Ucb1 {
    fn canonical(&self) -> String {
        PolicySpec::Ucb1 { rho: self.rho }.canonical()
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        let t = self.state.round();
        let k = self.state.num_arms() as u64;
        if t <= k {
            return Ok((t - 1) as usize);
        }
        let state = &self.state;
        Ok(argmax_lowest((0..state.num_arms()).map(|arm| {
            ucb_index(
                state.mean(arm),
                state.pull_count(arm) as f64,
                t as f64,
                self.rho,
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

#[derive(Debug, Clone)]
pub struct UcbH {
    rho: f64,
    horizon: u64,
    state: PolicyState,
}

impl UcbH {
    pub fn new(rho: f64, horizon: u64, num_arms: usize) -> Result<Self, PolicyError> {
        validate_rho(rho)?;
        if horizon < num_arms as u64 {
            return Err(PolicyError::HorizonTooShort { horizon, num_arms });
        }
        Ok(Self {
            rho,
            horizon,
            state: PolicyState::new(num_arms),
        })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }
}

impl BanditPolicy for UcbH {
    fn canonical(&self) -> String {
        PolicySpec::UcbH { rho: self.rho }.canonical()
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        let t = self.state.round();
        if t > self.horizon {
            return Err(PolicyError::HorizonExceeded {
                horizon: self.horizon,
            });
        }
        let k = self.state.num_arms() as u64;
        if t <= k {
            return Ok((t - 1) as usize);
        }
        let state = &self.state;
        let horizon = self.horizon as f64;
        Ok(argmax_lowest((0..state.num_arms()).map(|arm| {
            ucb_index(
                state.mean(arm),
                state.pull_count(arm) as f64,
                horizon,
                self.rho,
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
