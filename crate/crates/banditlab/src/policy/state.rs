//! Per-episode sufficient statistics shared by every policy.

/// Pull counts and reward sums, one entry per arm.
#[derive(Debug, Clone, Default)]
pub struct PolicyState {
    pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    total_pulls: u64,
}

impl PolicyState {
    pub fn new(num_arms: usize) -> Self {
        Self {
            pulls: vec![0; num_arms],
            reward_sums: vec![0.0; num_arms],
            total_pulls: 0,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    /// The 1-based round about to be played.
    pub fn round(&self) -> u64 {
        self.total_pulls + 1
    }

    pub fn total_pulls(&self) -> u64 {
        self.total_pulls
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn pull_count(&self, arm: usize) -> u64 {
        self.pulls[arm]
    }

    /// Empirical mean of an arm; only meaningful after its first pull.
    pub fn mean(&self, arm: usize) -> f64 {
        debug_assert!(self.pulls[arm] > 0);
        self.reward_sums[arm] / self.pulls[arm] as f64
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.pulls[arm] += 1;
        self.reward_sums[arm] += reward;
        self.total_pulls += 1;
    }
}
