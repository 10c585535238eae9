//! `verify`: built-in verification suites with machine-readable reports.
//!
//! * `oracle` — Monte Carlo pull-count laws against exact enumeration on
//!   tiny instances.
//! * `invariants` — determinism, accounting identities and statistics
//!   plumbing.
//! * `bounds` — empirical deviation bounds for the confidence-level policies
//!   and the UCB expectation bound.
//! * `decay` — anytime-versus-horizon decay of sampling-time exceedances.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Result};
use serde::Serialize;

use banditlab::env::{Environment, EnvironmentClass, RewardStream};
use banditlab::oracle::exact_distribution;
use banditlab::simulate::SampleSet;
use banditlab::stats::{
    binomial_se, decay_fit, mean_ci, smoothed_pmf, standard_error, tail_curve, trapezoid,
    PmfEstimate,
};
use banditlab::{run_monte_carlo, PolicySpec};

use crate::report;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub reps: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub struct VerifyOptions {
    pub seed: u64,
    pub reps: Option<u64>,
    pub workers: usize,
}

pub fn run(suite: &str, options: &VerifyOptions, out_dir: &Path) -> Result<bool> {
    let report = match suite {
        "oracle" => oracle_suite(options)?,
        "invariants" => invariants_suite(options)?,
        "bounds" => bounds_suite(options)?,
        "decay" => decay_suite(options)?,
        other => {
            bail!("unknown verify suite `{other}` (expected oracle, invariants, bounds or decay)")
        }
    };
    let json = serde_json::to_string_pretty(&report)?;
    report::write_file(out_dir, &format!("verify_{suite}.json"), &json)?;
    for check in &report.checks {
        println!(
            "[{}] {}: {}",
            if check.pass { "pass" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    Ok(report.all_pass())
}

fn env(literal: &str) -> Environment {
    Environment::parse(literal).expect("valid environment literal")
}

fn class(literals: &[&str]) -> Arc<EnvironmentClass> {
    Arc::new(EnvironmentClass::new(literals.iter().map(|s| env(s)).collect()).expect("valid class"))
}

fn spec(literal: &str) -> PolicySpec {
    PolicySpec::parse(literal).expect("valid policy literal")
}

/// Tiny-instance matrix: exact law vs Monte Carlo frequencies.
fn oracle_suite(options: &VerifyOptions) -> Result<VerifyReport> {
    let reps = options.reps.unwrap_or(200_000);
    let mut report = VerifyReport {
        suite: "oracle".into(),
        seed: options.seed,
        reps,
        checks: Vec::new(),
    };

    let two_arm = env("ber(0.6),ber(0.5)");
    let two_class = class(&["ber(0.6),ber(0.5)", "ber(0.5),ber(0.6)"]);
    let three_arm = env("ber(0.7),ber(0.3),ber(0.5)");
    let three_class = class(&[
        "ber(0.7),ber(0.3),ber(0.5)",
        "ber(0.2),ber(0.8),ber(0.5)",
        "ber(0.2),ber(0.3),ber(0.9)",
    ]);

    let cells: Vec<(&Environment, &Arc<EnvironmentClass>, PolicySpec)> = vec![
        (&two_arm, &two_class, spec("ucb1(0.5)")),
        (&two_arm, &two_class, spec("gclstar(0.6)")),
        (&two_arm, &two_class, spec("gclstar_kl(0.6)")),
        (&two_arm, &two_class, spec("gclb")),
        (&two_arm, &two_class, spec("gcl")),
        (&three_arm, &three_class, spec("ucb1(0.5)")),
        (&three_arm, &three_class, spec("gclstar(0.7)")),
        (&three_arm, &three_class, spec("gclstar_kl(0.7)")),
        (&three_arm, &three_class, spec("gclb")),
        (&three_arm, &three_class, spec("gcl")),
    ];

    for (environment, cls, policy) in cells {
        for n in [6u64, 8] {
            let name = format!("{policy} on {} at n={n}", environment.id());
            let exact = exact_distribution(environment, &policy, Some(cls), n)?;
            let mc = run_monte_carlo(
                environment,
                &policy,
                Some(cls),
                &[n],
                reps,
                options.seed,
                options.workers,
            )?;
            let (pass, detail) = compare_with_oracle(&exact, &mc, 4.0);
            report.push(name, pass, detail);
        }
    }
    Ok(report)
}

/// Per-mass-point agreement within `z` binomial standard errors, plus the
/// expected pseudo-regret.
pub fn compare_with_oracle(
    exact: &banditlab::oracle::ExactDistribution,
    mc: &SampleSet,
    z: f64,
) -> (bool, String) {
    let reps = mc.reps;
    let checkpoint = &mc.checkpoints[0];
    let mut observed: std::collections::BTreeMap<Vec<u64>, u64> = Default::default();
    for rep in 0..reps as usize {
        *observed
            .entry(checkpoint.pulls_of(rep, mc.num_arms).to_vec())
            .or_insert(0) += 1;
    }

    let mut worst: f64 = 0.0;
    for (pulls, &count) in &observed {
        if exact.probability_of(pulls) == 0.0 {
            return (
                false,
                format!("tuple {pulls:?} observed {count} times but impossible"),
            );
        }
    }
    for (pulls, &p) in &exact.pull_law {
        let p_hat = observed.get(pulls).copied().unwrap_or(0) as f64 / reps as f64;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        let sigmas = if se > 0.0 {
            (p_hat - p).abs() / se
        } else if p_hat == p {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(sigmas);
    }

    let (mean_pseudo, _) = mean_ci(&checkpoint.pseudo_regret).expect("reps >= 2");
    let se_pseudo = standard_error(&checkpoint.pseudo_regret).max(f64::EPSILON);
    let pseudo_sigmas = (mean_pseudo - exact.expected_pseudo_regret).abs() / se_pseudo;

    let pass = worst <= z && pseudo_sigmas <= z;
    (
        pass,
        format!(
            "{} mass points, worst deviation {worst:.2} se, \
             pseudo-regret {mean_pseudo:.5} vs exact {:.5} ({pseudo_sigmas:.2} se)",
            exact.pull_law.len(),
            exact.expected_pseudo_regret
        ),
    )
}

fn invariants_suite(options: &VerifyOptions) -> Result<VerifyReport> {
    let reps = options.reps.unwrap_or(5_000);
    let mut report = VerifyReport {
        suite: "invariants".into(),
        seed: options.seed,
        reps,
        checks: Vec::new(),
    };
    let difficult = env("ber(0.6),ber(0.5)");
    let policy = spec("ucb1(0.5)");

    // Worker-count determinism, checked by hash.
    let one = run_monte_carlo(&difficult, &policy, None, &[500], reps, options.seed, 1)?;
    let four = run_monte_carlo(&difficult, &policy, None, &[500], reps, options.seed, 4)?;
    let h1 = report::sha256_hex(&one.canonical_bytes());
    let h4 = report::sha256_hex(&four.canonical_bytes());
    report.push(
        "worker-count determinism",
        h1 == h4,
        format!("sha256 {h1} vs {h4}"),
    );

    // Pull counts sum to n at every checkpoint.
    let multi = run_monte_carlo(
        &difficult,
        &policy,
        None,
        &[100, 500],
        reps,
        options.seed,
        options.workers,
    )?;
    let sums_ok = multi.checkpoints.iter().all(|c| {
        (0..reps as usize).all(|r| c.pulls_of(r, multi.num_arms).iter().sum::<u64>() == c.n)
    });
    report.push(
        "pull counts sum to n",
        sums_ok,
        format!("checked {} replications at 2 checkpoints", reps),
    );

    // Realized and pseudo regret share their expectation.
    let big = run_monte_carlo(
        &difficult,
        &policy,
        None,
        &[1000],
        reps,
        options.seed,
        options.workers,
    )?;
    let c = &big.checkpoints[0];
    let (mr, _) = mean_ci(&c.regret)?;
    let (mp, _) = mean_ci(&c.pseudo_regret)?;
    let combined =
        (standard_error(&c.regret).powi(2) + standard_error(&c.pseudo_regret).powi(2)).sqrt();
    let gap = (mr - mp).abs();
    report.push(
        "regret and pseudo-regret expectations agree",
        gap <= 4.0 * combined,
        format!("means {mr:.4} vs {mp:.4}, gap {gap:.4} <= 4 x {combined:.4}"),
    );

    // The tail curve at one threshold equals a direct exceedance count.
    let n = 1000u64;
    let threshold = 4.0 * (n as f64).ln() / difficult.gaps().min_gap;
    let curve = tail_curve(&c.regret, &[threshold])?;
    let direct = c.regret.iter().filter(|&&r| r >= threshold).count() as f64 / reps as f64;
    report.push(
        "tail curve matches direct exceedance count",
        curve.estimates[0] == direct,
        format!(
            "{} == {} at threshold {threshold:.2}",
            curve.estimates[0], direct
        ),
    );

    // The smoothed density integrates to one.
    match smoothed_pmf(&c.regret, None)? {
        PmfEstimate::Density { grid, density, .. } => {
            let mass = trapezoid(&grid, &density);
            report.push(
                "smoothed pmf integrates to one",
                (mass - 1.0).abs() <= 1e-6,
                format!("trapezoid mass {mass:.9}"),
            );
        }
        PmfEstimate::Spike { location } => {
            report.push(
                "smoothed pmf integrates to one",
                false,
                format!("unexpected spike at {location}"),
            );
        }
    }
    Ok(report)
}

/// The constructive thresholds for the confidence-level policies, and the
/// classical UCB expectation bound, all at `n = 1000` and `beta = 1`.
fn bounds_suite(options: &VerifyOptions) -> Result<VerifyReport> {
    let reps = options.reps.unwrap_or(100_000);
    let mut report = VerifyReport {
        suite: "bounds".into(),
        seed: options.seed,
        reps,
        checks: Vec::new(),
    };
    let n = 1000u64;
    let beta = 1.0;
    let log_n = (n as f64).ln();

    // Mean sampling time of the suboptimal arm under ucb1(2).
    {
        let e = env("ber(0.9),ber(0.5)");
        let mc = run_monte_carlo(
            &e,
            &spec("ucb1(2)"),
            None,
            &[n],
            reps.min(20_000),
            options.seed,
            options.workers,
        )?;
        let c = &mc.checkpoints[0];
        let mean_t2 = c.arm_pulls(1, 2).map(|t| t as f64).sum::<f64>() / c.regret.len() as f64;
        let bound = 12.0 * log_n / (0.4f64 * 0.4);
        report.push(
            "ucb1(2) expected sampling time bound",
            mean_t2 <= bound,
            format!("mean T2(1000) = {mean_t2:.1} <= {bound:.1}"),
        );
    }

    // gclstar: the suboptimal arm exceeds the constructive threshold with
    // probability at most 2K/n^beta.
    {
        let e = env("ber(0.9),ber(0.5)");
        let mc = run_monte_carlo(
            &e,
            &spec("gclstar(0.9)"),
            None,
            &[n],
            reps,
            options.seed,
            options.workers,
        )?;
        let gap = e.gaps().gaps[1];
        let threshold = 1.0 + 2.0 * (beta + 1.0) * log_n / (gap * gap);
        let (pass, detail) = deviation_check(&mc, 1, threshold, 2.0 * 2.0 / n as f64);
        report.push("gclstar deviation bound", pass, detail);
    }

    // gclb on its two-member class, in both directions. With the true
    // environment (0.7, 0.5) the suboptimal arm's winning parameter equals
    // its true mean, the separation is zero and the threshold is infinite;
    // the (0.3, 0.5) direction has separation 0.4 and a real threshold.
    {
        let gclb_class = class(&["ber(0.3),ber(0.5)", "ber(0.7),ber(0.5)"]);
        for true_env in ["ber(0.7),ber(0.5)", "ber(0.3),ber(0.5)"] {
            let e = env(true_env);
            let suboptimal = 1 - e.best_arm();
            let d = gclb_class.mean_gap(&e, suboptimal);
            let threshold = 1.0 + 2.0 * (beta + 1.0) * log_n / (d * d);
            let mc = run_monte_carlo(
                &e,
                &spec("gclb"),
                Some(&gclb_class),
                &[n],
                reps,
                options.seed,
                options.workers,
            )?;
            let (pass, detail) = deviation_check(&mc, suboptimal, threshold, 2.0 * 2.0 / n as f64);
            report.push(
                format!("gclb deviation bound, true env {true_env} (d = {d:.1})"),
                pass,
                detail,
            );
        }
    }

    // Frequency of the Hoeffding failure event for a single Bernoulli arm:
    // some prefix mean deviates by more than sqrt((beta+1)/2 ln n / s).
    {
        let crossings = hoeffding_event_frequency(options.seed, reps, n, beta);
        let p_hat = crossings as f64 / reps as f64;
        let bound = 2.0 / n as f64;
        let se = binomial_se(p_hat, reps);
        report.push(
            "hoeffding prefix deviation event",
            p_hat <= bound + 3.0 * se,
            format!("{p_hat:.5} <= {bound:.5} + 3 x {se:.5}"),
        );
    }
    Ok(report)
}

/// Count replications in which some prefix of a Ber(0.5) stream deviates
/// past the `(beta+1)/2 ln n` envelope.
pub fn hoeffding_event_frequency(seed: u64, reps: u64, n: u64, beta: f64) -> u64 {
    use rayon::prelude::*;
    let dist = banditlab::ArmDistribution::bernoulli(0.5).unwrap();
    let envelope = 0.5 * (beta + 1.0) * (n as f64).ln();
    (0..reps)
        .into_par_iter()
        .filter(|&rep| {
            let mut stream = RewardStream::new(dist.clone(), seed, rep, 0);
            let mut sum = 0.0f64;
            for s in 1..=n {
                sum += stream.reward(s as usize - 1);
                let centered = sum - 0.5 * s as f64;
                // s * (mean - 0.5)^2 >= envelope
                if centered * centered >= envelope * s as f64 {
                    return true;
                }
            }
            false
        })
        .count() as u64
}

/// Empirical `P(T_arm(n) > threshold)` against `bound + 3 se`.
pub fn deviation_check(mc: &SampleSet, arm: usize, threshold: f64, bound: f64) -> (bool, String) {
    let c = &mc.checkpoints[0];
    let reps = mc.reps;
    let over = c
        .arm_pulls(arm, mc.num_arms)
        .filter(|&t| t as f64 > threshold)
        .count();
    let p_hat = over as f64 / reps as f64;
    let se = binomial_se(p_hat, reps);
    let pass = p_hat <= bound + 3.0 * se;
    (
        pass,
        format!("P(T > {threshold:.1}) = {p_hat:.5} <= {bound:.5} + 3 x {se:.5}"),
    )
}

/// Exceedance decay of the anytime and horizon UCB variants across two
/// decades of horizons.
fn decay_suite(options: &VerifyOptions) -> Result<VerifyReport> {
    let reps = options.reps.unwrap_or(20_000);
    let mut report = VerifyReport {
        suite: "decay".into(),
        seed: options.seed,
        reps,
        checks: Vec::new(),
    };
    let outcome = decay_comparison(&DecayParams {
        seed: options.seed,
        reps,
        workers: options.workers,
        grid: vec![100, 316, 1000, 3162, 10_000],
        stated: vec![100, 1000, 10_000],
        rho: 0.5,
        env: env(DECAY_ENV),
        c: 4.0,
        r2_margin: 0.05,
    })?;
    for check in outcome.checks {
        report.checks.push(check);
    }
    Ok(report)
}

/// The difficult two-arm instance used for decay measurements: a wide gap
/// keeps the exceedance threshold below the horizon at n = 100, and the
/// risky optimal arm gives the anytime policy a persistent chance of
/// getting stuck.
pub const DECAY_ENV: &str = "ber(0.75),ber(0.2)";

pub struct DecayParams {
    pub seed: u64,
    pub reps: u64,
    pub workers: usize,
    /// Measurement grid (superset of `stated`, enough points for a fit).
    pub grid: Vec<u64>,
    /// Horizons the degraded comparison runs at.
    pub stated: Vec<u64>,
    pub rho: f64,
    pub env: Environment,
    pub c: f64,
    pub r2_margin: f64,
}

pub struct DecayOutcome {
    pub checks: Vec<Check>,
    pub anytime: Vec<(u64, f64)>,
    pub horizon: Vec<(u64, f64)>,
}

/// Measure `P(T_k(n) >= C ln n / gap^2)` for `ucb1(rho)` (one trajectory,
/// all checkpoints) and `ucbh(rho)` (re-run per horizon), then classify the
/// decay shapes, or fall back to a pointwise comparison when the tails
/// drop below Monte Carlo resolution.
pub fn decay_comparison(params: &DecayParams) -> Result<DecayOutcome> {
    let suboptimal = 1 - params.env.best_arm();
    let gap = params.env.gaps().gaps[suboptimal];
    let threshold = |n: u64| params.c * (n as f64).ln() / (gap * gap);

    let anytime_set = run_monte_carlo(
        &params.env,
        &PolicySpec::Ucb1 { rho: params.rho },
        None,
        &params.grid,
        params.reps,
        params.seed,
        params.workers,
    )?;
    let horizon_set = run_monte_carlo(
        &params.env,
        &PolicySpec::UcbH { rho: params.rho },
        None,
        &params.grid,
        params.reps,
        params.seed,
        params.workers,
    )?;

    let exceedance = |set: &SampleSet, n: u64| -> f64 {
        let c = set.checkpoint(n).expect("checkpoint present");
        let over = c
            .arm_pulls(suboptimal, set.num_arms)
            .filter(|&t| t as f64 >= threshold(n))
            .count();
        over as f64 / set.reps as f64
    };

    let anytime: Vec<(u64, f64)> = params
        .grid
        .iter()
        .map(|&n| (n, exceedance(&anytime_set, n)))
        .collect();
    let horizon: Vec<(u64, f64)> = params
        .grid
        .iter()
        .map(|&n| (n, exceedance(&horizon_set, n)))
        .collect();

    let resolution = 10.0 / params.reps as f64;
    let resolvable = anytime
        .iter()
        .chain(&horizon)
        .all(|&(_, p)| p >= resolution);

    let mut checks = Vec::new();
    if resolvable {
        let fit_any = decay_fit(&anytime)?;
        let fit_hor = decay_fit(&horizon)?;
        checks.push(Check {
            name: "anytime exceedance is polylog-better-fit".into(),
            pass: fit_any.polylog.r_squared >= fit_any.polynomial.r_squared + params.r2_margin,
            detail: format!(
                "R2 polylog {:.4} vs polynomial {:.4}",
                fit_any.polylog.r_squared, fit_any.polynomial.r_squared
            ),
        });
        checks.push(Check {
            name: "horizon exceedance is polynomial-better-fit".into(),
            pass: fit_hor.polynomial.r_squared >= fit_hor.polylog.r_squared + params.r2_margin,
            detail: format!(
                "R2 polynomial {:.4} vs polylog {:.4}",
                fit_hor.polynomial.r_squared, fit_hor.polylog.r_squared
            ),
        });
    } else {
        for &n in &params.stated {
            let pa = anytime
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, p)| *p)
                .unwrap_or(0.0);
            let ph = horizon
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, p)| *p)
                .unwrap_or(0.0);
            let se = (binomial_se(pa, params.reps).powi(2) + binomial_se(ph, params.reps).powi(2))
                .sqrt();
            checks.push(Check {
                name: format!("degraded comparison at n = {n}"),
                pass: ph <= pa + 3.0 * se,
                detail: format!("horizon {ph:.6} <= anytime {pa:.6} + 3 x {se:.6}"),
            });
        }
    }
    Ok(DecayOutcome {
        checks,
        anytime,
        horizon,
    })
}
