//! Experiment configuration: a TOML file describing the environment, the
//! candidate class, the policies and the requested statistics.
//!
//! ```toml
//! seed = 42
//! reps = 10000
//! workers = 0
//! checkpoints = [1000]
//! policies = ["ucb1(0.5)", "ucbh(0.5)", "gclstar(0.6)"]
//!
//! [environment]
//! arms = ["ber(0.6)", "ber(0.5)"]
//!
//! [class]                       # required by gcl/gclb policies
//! members = [
//!     ["ber(0.6)", "ber(0.5)"],
//!     ["ber(0.5)", "ber(0.6)"],
//! ]
//!
//! [stats]
//! mean = true
//! tail_thresholds = [0.0, 5.0, 10.0]   # omit for an automatic grid
//! pmf_bandwidth = 0.8                  # omit for Silverman's rule
//!
//! [stats.f_check]
//! c = 4.0
//! c_tilde = 4.0
//! law = "power"                 # or "polylog"
//! param = 1.0
//!
//! [sweep]                       # used by the `sweep` subcommand
//! family = "ucb1"
//! rhos = [0.1, 0.2, 0.5, 1.0]
//! ```

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use banditlab::env::{Environment, EnvironmentClass};
use banditlab::stats::{FTailParams, TailLaw};
use banditlab::PolicySpec;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: u64,
    #[serde(default)]
    pub workers: usize,
    pub checkpoints: Vec<u64>,
    pub policies: Vec<String>,
    #[serde(default)]
    pub allow_misspecified: bool,
    pub environment: EnvironmentSection,
    pub class: Option<ClassSection>,
    #[serde(default)]
    pub stats: StatsSection,
    pub sweep: Option<SweepSection>,
}

fn default_reps() -> u64 {
    10_000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub arms: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSection {
    pub members: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsSection {
    #[serde(default = "default_true")]
    pub mean: bool,
    pub tail_thresholds: Option<Vec<f64>>,
    pub pmf_bandwidth: Option<f64>,
    pub f_check: Option<FCheckSection>,
}

impl Default for StatsSection {
    fn default() -> Self {
        Self {
            mean: true,
            tail_thresholds: None,
            pmf_bandwidth: None,
            f_check: None,
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FCheckSection {
    pub c: f64,
    pub c_tilde: f64,
    pub law: String,
    pub param: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub family: String,
    pub rhos: Vec<f64>,
}

/// A validated experiment, ready to run.
#[derive(Debug)]
pub struct Experiment {
    pub seed: u64,
    pub reps: u64,
    pub workers: usize,
    pub checkpoints: Vec<u64>,
    pub environment: Environment,
    pub class: Option<Arc<EnvironmentClass>>,
    pub policies: Vec<PolicySpec>,
    pub stats: StatsRequests,
    pub sweep: Option<(String, Vec<f64>)>,
}

#[derive(Debug)]
pub struct StatsRequests {
    pub mean: bool,
    pub tail_thresholds: Option<Vec<f64>>,
    pub pmf_bandwidth: Option<f64>,
    pub f_check: Option<FTailParams>,
}

/// Command-line overrides for config-file values.
#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub reps: Option<u64>,
    pub workers: Option<usize>,
}

pub fn load(path: &Path, overrides: Overrides) -> Result<Experiment> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let file: ConfigFile =
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))?;
    resolve(file, overrides)
}

pub fn resolve(file: ConfigFile, overrides: Overrides) -> Result<Experiment> {
    let environment = Environment::new(
        file.environment
            .arms
            .iter()
            .map(|s| banditlab::ArmDistribution::parse(s))
            .collect::<Result<Vec<_>, _>>()
            .context("parsing environment arms")?,
    )
    .context("building the environment")?;

    let class = file
        .class
        .map(|section| -> Result<Arc<EnvironmentClass>> {
            let members = section
                .members
                .iter()
                .map(|arms| {
                    Environment::new(
                        arms.iter()
                            .map(|s| banditlab::ArmDistribution::parse(s))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                    .map_err(anyhow::Error::from)
                })
                .collect::<Result<Vec<_>>>()
                .context("parsing class members")?;
            Ok(Arc::new(EnvironmentClass::new(members)?))
        })
        .transpose()?;

    let policies = file
        .policies
        .iter()
        .map(|s| PolicySpec::parse(s).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()
        .context("parsing policies")?;
    if policies.is_empty() {
        bail!("the config lists no policies");
    }

    for policy in &policies {
        if policy.needs_class() {
            let class = class
                .as_ref()
                .with_context(|| format!("policy `{policy}` needs a [class] section"))?;
            if class.num_arms() != environment.num_arms() {
                bail!(
                    "class members have {} arms but the environment has {}",
                    class.num_arms(),
                    environment.num_arms()
                );
            }
            if !file.allow_misspecified && !class.contains(&environment) {
                bail!(
                    "the environment is not a member of the class; \
                     set allow_misspecified = true to run anyway"
                );
            }
        }
    }

    let f_check = file
        .stats
        .f_check
        .map(|section| -> Result<FTailParams> {
            let law = match section.law.as_str() {
                "power" => TailLaw::Power {
                    beta: section.param,
                },
                "polylog" => TailLaw::PolyLog {
                    alpha: section.param,
                },
                other => bail!("unknown tail law `{other}` (expected `power` or `polylog`)"),
            };
            Ok(FTailParams {
                c: section.c,
                c_tilde: section.c_tilde,
                law,
            })
        })
        .transpose()?;

    if let Some(h) = file.stats.pmf_bandwidth {
        if !(h.is_finite() && h > 0.0) {
            bail!("pmf_bandwidth must be positive (got {h}); omit it for an automatic bandwidth");
        }
    }

    let sweep = file
        .sweep
        .map(|s| -> Result<(String, Vec<f64>)> {
            if !matches!(s.family.as_str(), "ucb1" | "ucbh") {
                bail!("sweep family must be `ucb1` or `ucbh`, got `{}`", s.family);
            }
            if s.rhos.is_empty() {
                bail!("sweep needs at least one rho");
            }
            Ok((s.family, s.rhos))
        })
        .transpose()?;

    Ok(Experiment {
        seed: overrides.seed.unwrap_or(file.seed),
        reps: overrides.reps.unwrap_or(file.reps),
        workers: overrides.workers.unwrap_or(file.workers),
        checkpoints: file.checkpoints,
        environment,
        class,
        policies,
        stats: StatsRequests {
            mean: file.stats.mean,
            tail_thresholds: file.stats.tail_thresholds,
            pmf_bandwidth: file.stats.pmf_bandwidth,
            f_check,
        },
        sweep,
    })
}
