//! Index policies behind a single sequential-decision interface.
//!
//! Every policy is a [`BanditPolicy`] trait object built from a parsed
//! [`PolicySpec`]. Specs are looked up by name in the [`registry`], which is
//! what the CLI and config layer use to select a policy family at runtime.

mod gcl;
mod gcl_star;
mod kl;
mod state;
mod ucb;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::env::{parse_decimal, EnvironmentClass};

pub use gcl::{gcl_index, gclb_index, Gcl, GclB};
pub use gcl_star::{gclstar_index, gclstar_kl_index, GclStar, GclStarKl};
pub use kl::bern_kl;
pub use state::PolicyState;
pub use ucb::{ucb_index, Ucb1, UcbH};

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("cannot parse policy literal `{0}`")]
    BadLiteral(String),
    #[error("policy `{name}` needs {what}")]
    MissingContext {
        name: &'static str,
        what: &'static str,
    },
    #[error("exploration parameter must be finite and >= 0 (got {rho})")]
    BadRho { rho: f64 },
    #[error("mu_star = {mu_star} is outside {expected}")]
    BadMuStar {
        mu_star: f64,
        expected: &'static str,
    },
    #[error("horizon policy played past its declared horizon {horizon}")]
    HorizonExceeded { horizon: u64 },
    #[error("horizon must be at least the number of arms ({num_arms}), got {horizon}")]
    HorizonTooShort { horizon: u64, num_arms: usize },
    #[error("KL reference parameter q = {q} must lie strictly inside (0, 1)")]
    KlReferenceOutOfRange { q: f64 },
    #[error("gclb needs an all-Bernoulli class with positive parameters")]
    ClassNotBernoulli,
}

/// A parsed policy literal; the runtime-selectable unit of the library.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Ucb1 { rho: f64 },
    UcbH { rho: f64 },
    Gcl,
    GclB,
    GclStar { mu_star: f64 },
    GclStarKl { mu_star: f64 },
}

impl PolicySpec {
    /// Parse a policy literal: `ucb1(rho)`, `ucbh(rho)`, `gcl`, `gclb`,
    /// `gclstar(mu_star)`, `gclstar_kl(mu_star)`. Case-insensitive.
    pub fn parse(literal: &str) -> Result<Self, PolicyError> {
        registry::parse(literal)
    }

    /// The canonical literal this spec serializes to.
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// Horizon policies need to know the total number of rounds in advance.
    pub fn is_horizon(&self) -> bool {
        matches!(self, Self::UcbH { .. })
    }

    /// GCL and GCL-B reason over a finite environment class.
    pub fn needs_class(&self) -> bool {
        matches!(self, Self::Gcl | Self::GclB)
    }

    /// Instantiate a fresh policy for one episode.
    pub fn build(&self, ctx: &BuildContext) -> Result<Box<dyn BanditPolicy>, PolicyError> {
        let num_arms = ctx.num_arms;
        match self {
            Self::Ucb1 { rho } => Ok(Box::new(Ucb1::new(*rho, num_arms)?)),
            Self::UcbH { rho } => {
                let horizon = ctx.horizon.ok_or(PolicyError::MissingContext {
                    name: "ucbh",
                    what: "a horizon",
                })?;
                Ok(Box::new(UcbH::new(*rho, horizon, num_arms)?))
            }
            Self::Gcl => {
                let class = ctx.class.clone().ok_or(PolicyError::MissingContext {
                    name: "gcl",
                    what: "an environment class",
                })?;
                Ok(Box::new(Gcl::new(class, num_arms)))
            }
            Self::GclB => {
                let class = ctx.class.clone().ok_or(PolicyError::MissingContext {
                    name: "gclb",
                    what: "an environment class",
                })?;
                Ok(Box::new(GclB::new(class, num_arms)?))
            }
            Self::GclStar { mu_star } => Ok(Box::new(GclStar::new(*mu_star, num_arms)?)),
            Self::GclStarKl { mu_star } => Ok(Box::new(GclStarKl::new(*mu_star, num_arms)?)),
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ucb1 { rho } => write!(f, "ucb1({rho})"),
            Self::UcbH { rho } => write!(f, "ucbh({rho})"),
            Self::Gcl => write!(f, "gcl"),
            Self::GclB => write!(f, "gclb"),
            Self::GclStar { mu_star } => write!(f, "gclstar({mu_star})"),
            Self::GclStarKl { mu_star } => write!(f, "gclstar_kl({mu_star})"),
        }
    }
}

/// Everything a spec may need at instantiation time. The harness injects the
/// horizon for horizon policies; the class comes from the experiment config.
#[derive(Debug, Clone, Default)]
pub struct BuildContext {
    pub num_arms: usize,
    pub horizon: Option<u64>,
    pub class: Option<Arc<EnvironmentClass>>,
}

impl BuildContext {
    pub fn new(num_arms: usize) -> Self {
        Self {
            num_arms,
            horizon: None,
            class: None,
        }
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn with_class(mut self, class: Arc<EnvironmentClass>) -> Self {
        self.class = Some(class);
        self
    }
}

/// The sequential-decision interface every policy implements.
///
/// A policy is a deterministic function of the history of observed rewards:
/// replaying the same history yields the same choices. Rounds `1..=K` play
/// each arm once, in index order.
pub trait BanditPolicy: Send {
    /// Canonical literal of the policy (its identifier in outputs).
    fn canonical(&self) -> String;

    /// Choose the arm for the next round.
    fn select(&mut self) -> Result<usize, PolicyError>;

    /// Feed back the reward observed for `arm`.
    fn record(&mut self, arm: usize, reward: f64);

    /// Pull counts and empirical means.
    fn state(&self) -> &PolicyState;

    /// Clone into a new boxed trait object (exact enumeration branches on
    /// this).
    fn clone_box(&self) -> Box<dyn BanditPolicy>;
}

impl Clone for Box<dyn BanditPolicy> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Index of the maximal value, ties broken by the lowest index.
pub(crate) fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Index of the minimal value, ties broken by the lowest index. An all-`inf`
/// input falls back to index 0.
pub(crate) fn argmin_lowest(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v < best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Name-keyed lookup of the built-in policy families.
pub mod registry {
    use super::*;

    /// One selectable policy family.
    pub struct PolicyDescriptor {
        pub name: &'static str,
        /// Literal shape accepted by the parser.
        pub synopsis: &'static str,
        pub needs_class: bool,
        pub is_horizon: bool,
        parse_args: fn(Option<&str>) -> Result<PolicySpec, ()>,
    }

    fn one_decimal(args: Option<&str>) -> Result<f64, ()> {
        parse_decimal(args.ok_or(())?).ok_or(())
    }

    fn no_args(args: Option<&str>) -> Result<(), ()> {
        match args {
            None => Ok(()),
            Some(a) if a.trim().is_empty() => Ok(()),
            Some(_) => Err(()),
        }
    }

    /// Registered families, in presentation order.
    pub const DESCRIPTORS: &[PolicyDescriptor] = &[
        PolicyDescriptor {
            name: "ucb1",
            synopsis: "ucb1(rho)",
            needs_class: false,
            is_horizon: false,
            parse_args: |a| {
                Ok(PolicySpec::Ucb1 {
                    rho: one_decimal(a)?,
                })
            },
        },
        PolicyDescriptor {
            name: "ucbh",
            synopsis: "ucbh(rho)",
            needs_class: false,
            is_horizon: true,
            parse_args: |a| {
                Ok(PolicySpec::UcbH {
                    rho: one_decimal(a)?,
                })
            },
        },
        PolicyDescriptor {
            name: "gcl",
            synopsis: "gcl",
            needs_class: true,
            is_horizon: false,
            parse_args: |a| no_args(a).map(|_| PolicySpec::Gcl),
        },
        PolicyDescriptor {
            name: "gclb",
            synopsis: "gclb",
            needs_class: true,
            is_horizon: false,
            parse_args: |a| no_args(a).map(|_| PolicySpec::GclB),
        },
        PolicyDescriptor {
            name: "gclstar",
            synopsis: "gclstar(mu_star)",
            needs_class: false,
            is_horizon: false,
            parse_args: |a| {
                Ok(PolicySpec::GclStar {
                    mu_star: one_decimal(a)?,
                })
            },
        },
        PolicyDescriptor {
            name: "gclstar_kl",
            synopsis: "gclstar_kl(mu_star)",
            needs_class: false,
            is_horizon: false,
            parse_args: |a| {
                Ok(PolicySpec::GclStarKl {
                    mu_star: one_decimal(a)?,
                })
            },
        },
    ];

    pub fn lookup(name: &str) -> Option<&'static PolicyDescriptor> {
        DESCRIPTORS.iter().find(|d| d.name == name)
    }

    /// Parse a policy literal against the registered families.
    pub fn parse(literal: &str) -> Result<PolicySpec, PolicyError> {
        let s = literal.trim().to_ascii_lowercase();
        let bad = || PolicyError::BadLiteral(literal.to_string());
        let (name, args) = match s.find('(') {
            Some(open) => {
                if !s.ends_with(')') {
                    return Err(bad());
                }
                (&s[..open], Some(&s[open + 1..s.len() - 1]))
            }
            None => (s.as_str(), None),
        };
        let descriptor = lookup(name).ok_or_else(bad)?;
        (descriptor.parse_args)(args).map_err(|()| bad())
    }
}
