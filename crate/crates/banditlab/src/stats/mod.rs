//! Summary statistics over Monte Carlo samples: means with confidence
//! intervals, tail curves, smoothed densities, deviation-bound checks and
//! decay-law fits.

use thiserror::Error;

use crate::env::Environment;
use crate::simulate::SampleSet;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} samples (got {got})")]
    NotEnoughSamples { needed: usize, got: usize },
    #[error("thresholds must be ascending")]
    UnsortedThresholds,
    #[error("the environment has two optimal arms; tail thresholds are undefined")]
    DegenerateEnvironment,
    #[error("tail below Monte Carlo resolution: every estimate is zero")]
    TailBelowResolution,
    #[error("decay fit needs at least 4 grid points with nonzero estimates (got {0})")]
    NotEnoughDecayPoints(usize),
}

/// Sample mean and 95% normal-approximation halfwidth.
pub fn mean_ci(samples: &[f64]) -> Result<(f64, f64), StatsError> {
    if samples.len() < 2 {
        return Err(StatsError::NotEnoughSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, 1.96 * (var / n).sqrt()))
}

/// Standard error of the sample mean.
pub fn standard_error(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Binomial standard error of an empirical probability over `reps` trials.
pub fn binomial_se(p_hat: f64, reps: u64) -> f64 {
    (p_hat * (1.0 - p_hat) / reps as f64).sqrt()
}

/// Empirical survival estimates `P(sample >= x)` on an ascending threshold
/// grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCurve {
    pub thresholds: Vec<f64>,
    pub estimates: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub reps: u64,
}

pub fn tail_curve(samples: &[f64], thresholds: &[f64]) -> Result<TailCurve, StatsError> {
    if !thresholds.windows(2).all(|w| w[0] <= w[1]) {
        return Err(StatsError::UnsortedThresholds);
    }
    let reps = samples.len() as u64;
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let estimates: Vec<f64> = thresholds
        .iter()
        .map(|&x| {
            let below = sorted.partition_point(|&v| v < x);
            (sorted.len() - below) as f64 / reps as f64
        })
        .collect();
    let standard_errors = estimates.iter().map(|&p| binomial_se(p, reps)).collect();
    Ok(TailCurve {
        thresholds: thresholds.to_vec(),
        estimates,
        standard_errors,
        reps,
    })
}

/// A kernel density estimate, or a single spike when the sample has no
/// spread.
#[derive(Debug, Clone, PartialEq)]
pub enum PmfEstimate {
    Spike {
        location: f64,
    },
    Density {
        grid: Vec<f64>,
        density: Vec<f64>,
        bandwidth: f64,
    },
}

/// Gaussian-kernel density estimate on an even grid covering
/// `[min - 3h, max + 3h]`, normalized so the trapezoid integral is one.
/// `bandwidth = None` uses Silverman's rule `1.06 sd R^(-1/5)`.
pub fn smoothed_pmf(samples: &[f64], bandwidth: Option<f64>) -> Result<PmfEstimate, StatsError> {
    if samples.len() < 2 {
        return Err(StatsError::NotEnoughSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    let h = match bandwidth {
        Some(h) if h > 0.0 => h,
        _ => 1.06 * sd * n.powf(-0.2),
    };
    if sd == 0.0 || h == 0.0 {
        return Ok(PmfEstimate::Spike {
            location: samples[0],
        });
    }

    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let points = (((hi - lo) / (h / 2.0)).ceil() as usize + 1).clamp(64, 16384);
    let step = (hi - lo) / (points - 1) as f64;
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * n);
    let grid: Vec<f64> = (0..points).map(|i| lo + i as f64 * step).collect();
    let mut density: Vec<f64> = grid
        .iter()
        .map(|&x| {
            samples
                .iter()
                .map(|&s| {
                    let z = (x - s) / h;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    // The grid clips the kernels at three bandwidths; renormalize so the
    // trapezoid integral is exactly one.
    let mass = trapezoid(&grid, &density);
    for d in &mut density {
        *d /= mass;
    }
    Ok(PmfEstimate::Density {
        grid,
        density,
        bandwidth: h,
    })
}

pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Decay law used as the deviation bound denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailLaw {
    /// `f(n) = n^beta`
    Power { beta: f64 },
    /// `f(n) = (ln n)^alpha`
    PolyLog { alpha: f64 },
}

impl TailLaw {
    pub fn eval(&self, n: u64) -> f64 {
        match self {
            Self::Power { beta } => (n as f64).powf(*beta),
            Self::PolyLog { alpha } => (n as f64).ln().powf(*alpha),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Power { beta } => format!("n^{beta}"),
            Self::PolyLog { alpha } => format!("(ln n)^{alpha}"),
        }
    }
}

/// Parameters of an upper-tail check: is
/// `P(T_k(n) >= C ln n / gap_k^2) <= C_tilde / f(n)` consistent with the
/// samples?
#[derive(Debug, Clone, Copy)]
pub struct FTailParams {
    pub c: f64,
    pub c_tilde: f64,
    pub law: TailLaw,
}

#[derive(Debug, Clone)]
pub struct FTailRow {
    pub n: u64,
    pub arm: usize,
    pub threshold: f64,
    pub exceedance: f64,
    pub bound: f64,
    pub standard_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct FTailReport {
    pub policy: String,
    pub env_id: String,
    pub params: FTailParams,
    pub rows: Vec<FTailRow>,
}

impl FTailReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Compare each suboptimal arm's sampling-time exceedance with the requested
/// bound, at every checkpoint. A row passes when the estimate is at most the
/// bound plus two binomial standard errors.
pub fn f_tail_check(
    samples: &SampleSet,
    env: &Environment,
    params: FTailParams,
) -> Result<FTailReport, StatsError> {
    let gaps = env.gaps();
    if gaps.degenerate {
        return Err(StatsError::DegenerateEnvironment);
    }
    let mut rows = Vec::new();
    for checkpoint in &samples.checkpoints {
        let n = checkpoint.n;
        for arm in 0..samples.num_arms {
            if arm == gaps.best_arm {
                continue;
            }
            let gap = gaps.gaps[arm];
            let threshold = params.c * (n as f64).ln() / (gap * gap);
            let over = checkpoint
                .arm_pulls(arm, samples.num_arms)
                .filter(|&t| t as f64 >= threshold)
                .count();
            let exceedance = over as f64 / samples.reps as f64;
            let standard_error = binomial_se(exceedance, samples.reps);
            let bound = params.c_tilde / params.law.eval(n);
            rows.push(FTailRow {
                n,
                arm,
                threshold,
                exceedance,
                bound,
                standard_error,
                pass: exceedance <= bound + 2.0 * standard_error,
            });
        }
    }
    Ok(FTailReport {
        policy: samples.policy.clone(),
        env_id: samples.env_id.clone(),
        params,
        rows,
    })
}

/// Least-squares fit quality of `ln p` against a transform of `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitQuality {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// `ln p` against `ln ln n`.
    pub polylog: FitQuality,
    /// `ln p` against `ln n`.
    pub polynomial: FitQuality,
    /// Neither model shows a meaningful negative slope.
    pub no_decay: bool,
}

/// Classify how exceedance probabilities decay over `n`, comparing a
/// polylogarithmic against a polynomial model by least-squares fit of the
/// log estimates. Zero estimates are excluded; at least four nonzero points
/// are required.
pub fn decay_fit(points: &[(u64, f64)]) -> Result<DecayFit, StatsError> {
    let nonzero: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|&(n, p)| (n as f64, p.ln()))
        .collect();
    if nonzero.is_empty() {
        return Err(StatsError::TailBelowResolution);
    }
    if nonzero.len() < 4 {
        return Err(StatsError::NotEnoughDecayPoints(nonzero.len()));
    }
    let ys: Vec<f64> = nonzero.iter().map(|&(_, y)| y).collect();
    let polylog = least_squares(
        &nonzero
            .iter()
            .map(|&(n, _)| n.ln().ln())
            .collect::<Vec<_>>(),
        &ys,
    );
    let polynomial = least_squares(
        &nonzero.iter().map(|&(n, _)| n.ln()).collect::<Vec<_>>(),
        &ys,
    );
    Ok(DecayFit {
        polylog,
        polynomial,
        no_decay: polylog.slope.abs() < 0.05 && polynomial.slope.abs() < 0.05,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> FitQuality {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    // A flat response is fit perfectly by a flat line.
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    FitQuality {
        slope,
        intercept,
        r_squared,
    }
}
