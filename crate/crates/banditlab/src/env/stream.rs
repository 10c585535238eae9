//! Deterministic per-arm reward streams.
//!
//! Every `(base seed, replication, arm)` triple owns an independent RNG
//! stream, so rewards are reproducible regardless of how episodes are
//! scheduled across workers or in which order draws are requested.
//!
//! The derivation is part of the output contract:
//!
//! * `episode_seed = mix64(mix64(base_seed) + replication)` where `mix64` is
//!   the SplitMix64 finalizer,
//! * arm `k` draws from `ChaCha8` keyed by `episode_seed` on stream `k`,
//! * draw `s` (0-based) maps the `s`-th `f64` in `[0, 1)` from that stream
//!   through the inverse CDF; exactly one value is consumed per draw for
//!   every distribution family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dist::ArmDistribution;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Episode-level seed for replication `r` of a run with `base_seed`.
pub fn episode_seed(base_seed: u64, replication: u64) -> u64 {
    mix64(mix64(base_seed).wrapping_add(replication))
}

/// Lazily drawn i.i.d. rewards of one arm, indexable by draw number.
///
/// Values are cached so that indexed access is repeatable; the best arm's
/// stream is read both by the policy (its actual pulls) and by the regret
/// accounting (the full counterfactual prefix).
#[derive(Debug, Clone)]
pub struct RewardStream {
    dist: ArmDistribution,
    rng: ChaCha8Rng,
    drawn: Vec<f64>,
}

impl RewardStream {
    pub fn new(dist: ArmDistribution, base_seed: u64, replication: u64, arm: usize) -> Self {
        Self::with_episode_seed(dist, episode_seed(base_seed, replication), arm)
    }

    pub fn with_episode_seed(dist: ArmDistribution, episode_seed: u64, arm: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(episode_seed);
        rng.set_stream(arm as u64);
        Self {
            dist,
            rng,
            drawn: Vec::new(),
        }
    }

    /// The `s`-th reward of this arm, 0-based.
    pub fn reward(&mut self, s: usize) -> f64 {
        while self.drawn.len() <= s {
            let u: f64 = self.rng.random();
            self.drawn.push(self.dist.quantile(u));
        }
        self.drawn[s]
    }

    /// Sum of the first `n` rewards, accumulated in draw order.
    pub fn prefix_sum(&mut self, n: usize) -> f64 {
        if n > 0 {
            self.reward(n - 1);
        }
        self.drawn[..n].iter().sum()
    }
}
