//! Stochastic multi-armed bandits with reward laws on `[0, 1]`: index
//! policies from the UCB and greatest-confidence-level families, a
//! reproducible Monte Carlo harness, tail statistics for regret and sampling
//! times, and an exact enumeration oracle for testing.
//!
//! The policy families are interchangeable behind the
//! [`policy::BanditPolicy`] trait and are selected by name at runtime (see
//! [`policy::registry`]):
//!
//! * `ucb1(rho)` — anytime upper confidence bound with exploration rate
//!   `rho`,
//! * `ucbh(rho)` — the horizon variant, which plugs the total number of
//!   rounds into the exploration term,
//! * `gcl` — picks the arm whose empirical CDF best matches a distribution
//!   that would make it optimal within a finite candidate class,
//! * `gclb` — the all-Bernoulli specialization of `gcl`,
//! * `gclstar(mu_star)` / `gclstar_kl(mu_star)` — variants for a known best
//!   mean, with quadratic and Bernoulli-KL confidence levels.
//!
//! Reproducibility contract: every `(base seed, replication, arm)` triple
//! owns an RNG stream derived as documented in [`env::episode_seed`], so any
//! run is bit-identical across schedulers and worker counts.
//!
//! ```
//! use banditlab::{run_monte_carlo, Environment, PolicySpec};
//!
//! let env = Environment::parse("ber(0.6),ber(0.5)").unwrap();
//! let policy = PolicySpec::parse("ucb1(0.5)").unwrap();
//! let samples = run_monte_carlo(&env, &policy, None, &[100], 50, 7, 1).unwrap();
//! let checkpoint = &samples.checkpoints[0];
//! assert_eq!(checkpoint.regret.len(), 50);
//! assert!(checkpoint.pseudo_regret.iter().all(|&r| r >= 0.0));
//! ```

pub mod env;
pub mod ks;
pub mod oracle;
pub mod policy;
pub mod simulate;
pub mod stats;

pub use env::{ArmDistribution, Environment, EnvironmentClass, RewardStream};
pub use policy::{BanditPolicy, BuildContext, PolicySpec};
pub use simulate::{run_episode, run_monte_carlo, EpisodeResult, SampleSet};
