//! Reward distributions, environments, environment classes and reward
//! streams.

mod class;
mod dist;
mod environment;
mod stream;

pub use class::{ClassError, EnvironmentClass};
pub use dist::{density_ratio_zero, ArmDistribution, DistError, WEIGHT_TOLERANCE};
pub use environment::{EnvError, Environment, Gaps};
pub use stream::{episode_seed, mix64, RewardStream};

pub(crate) use dist::parse_decimal;
