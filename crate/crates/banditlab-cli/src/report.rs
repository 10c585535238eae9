//! Output files: CSV data, plain SVG plots and hashing helpers.
//!
//! The CSV schemas are the stable interface of the tool:
//!
//! * `regret.csv`: `policy,env_id,n,replication,regret,pseudo_regret`
//! * `counts.csv`: `policy,env_id,n,replication,arm,pulls`
//! * `tail.csv`: `policy,env_id,n,threshold,p_hat,se`
//! * `pmf.csv`: `policy,env_id,n,x,density`
//!
//! Floats are serialized with 17 significant digits; rows are sorted by
//! `(policy, n, replication, arm)`; arm numbers are 1-based. Fields
//! containing commas (the `env_id` of any multi-arm environment does) are
//! double-quoted.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use banditlab::simulate::SampleSet;
use banditlab::stats::{FTailReport, PmfEstimate, TailCurve};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Samples sorted the way the CSV files are written: by policy literal, then
/// checkpoint.
fn sorted_sets(sets: &[SampleSet]) -> Vec<&SampleSet> {
    let mut refs: Vec<&SampleSet> = sets.iter().collect();
    refs.sort_by(|a, b| a.policy.cmp(&b.policy));
    refs
}

pub fn regret_csv(sets: &[SampleSet]) -> String {
    let mut out = String::from("policy,env_id,n,replication,regret,pseudo_regret\n");
    for set in sorted_sets(sets) {
        let policy = csv_field(&set.policy);
        let env = csv_field(&set.env_id);
        for checkpoint in &set.checkpoints {
            for rep in 0..set.reps as usize {
                let _ = writeln!(
                    out,
                    "{policy},{env},{n},{rep},{regret},{pseudo}",
                    n = checkpoint.n,
                    regret = fmt_f64(checkpoint.regret[rep]),
                    pseudo = fmt_f64(checkpoint.pseudo_regret[rep]),
                );
            }
        }
    }
    out
}

pub fn counts_csv(sets: &[SampleSet]) -> String {
    let mut out = String::from("policy,env_id,n,replication,arm,pulls\n");
    for set in sorted_sets(sets) {
        let policy = csv_field(&set.policy);
        let env = csv_field(&set.env_id);
        for checkpoint in &set.checkpoints {
            for rep in 0..set.reps as usize {
                let pulls = checkpoint.pulls_of(rep, set.num_arms);
                for (arm, &count) in pulls.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{policy},{env},{n},{rep},{arm},{count}",
                        n = checkpoint.n,
                        arm = arm + 1,
                    );
                }
            }
        }
    }
    out
}

pub fn tail_csv(curves: &[(String, String, u64, TailCurve)]) -> String {
    let mut rows: Vec<&(String, String, u64, TailCurve)> = curves.iter().collect();
    rows.sort_by(|a, b| (&a.0, a.2).cmp(&(&b.0, b.2)));
    let mut out = String::from("policy,env_id,n,threshold,p_hat,se\n");
    for (policy, env_id, n, curve) in rows {
        let policy = csv_field(policy);
        let env = csv_field(env_id);
        for i in 0..curve.thresholds.len() {
            let _ = writeln!(
                out,
                "{policy},{env},{n},{threshold},{p},{se}",
                threshold = fmt_f64(curve.thresholds[i]),
                p = fmt_f64(curve.estimates[i]),
                se = fmt_f64(curve.standard_errors[i]),
            );
        }
    }
    out
}

pub fn pmf_csv(estimates: &[(String, String, u64, PmfEstimate)]) -> String {
    let mut rows: Vec<&(String, String, u64, PmfEstimate)> = estimates.iter().collect();
    rows.sort_by(|a, b| (&a.0, a.2).cmp(&(&b.0, b.2)));
    let mut out = String::from("policy,env_id,n,x,density\n");
    for (policy, env_id, n, estimate) in rows {
        let policy = csv_field(policy);
        let env = csv_field(env_id);
        match estimate {
            PmfEstimate::Spike { location } => {
                // A point mass has no density; mark it with an infinite spike.
                let _ = writeln!(out, "{policy},{env},{n},{},inf", fmt_f64(*location));
            }
            PmfEstimate::Density { grid, density, .. } => {
                for (x, d) in grid.iter().zip(density) {
                    let _ = writeln!(out, "{policy},{env},{n},{},{}", fmt_f64(*x), fmt_f64(*d));
                }
            }
        }
    }
    out
}

pub fn fcheck_csv(reports: &[FTailReport]) -> String {
    let mut refs: Vec<&FTailReport> = reports.iter().collect();
    refs.sort_by(|a, b| a.policy.cmp(&b.policy));
    let mut out = String::from("policy,env_id,n,arm,threshold,p_hat,bound,se,pass\n");
    for report in refs {
        let policy = csv_field(&report.policy);
        let env = csv_field(&report.env_id);
        for row in &report.rows {
            let _ = writeln!(
                out,
                "{policy},{env},{n},{arm},{threshold},{p},{bound},{se},{pass}",
                n = row.n,
                arm = row.arm + 1,
                threshold = fmt_f64(row.threshold),
                p = fmt_f64(row.exceedance),
                bound = fmt_f64(row.bound),
                se = fmt_f64(row.standard_error),
                pass = row.pass,
            );
        }
    }
    out
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// A minimal line plot of tail curves, one polyline per policy.
pub fn tail_svg(curves: &[(String, String, u64, TailCurve)], title: &str) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 60.0;
    const COLORS: [&str; 8] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    ];

    let mut x_max = 0.0f64;
    for (_, _, _, c) in curves {
        for &t in &c.thresholds {
            x_max = x_max.max(t);
        }
    }
    if x_max <= 0.0 {
        x_max = 1.0;
    }
    let sx = |x: f64| MARGIN + x / x_max * (W - 2.0 * MARGIN);
    let sy = |p: f64| H - MARGIN - p * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        title
    );
    // Axes.
    let _ = writeln!(
        svg,
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>",
        MARGIN,
        H - MARGIN,
        W - MARGIN
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>",
        MARGIN,
        MARGIN,
        H - MARGIN
    );
    for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{frac}</text>",
            MARGIN - 6.0,
            sy(frac) + 4.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.1}</text>",
            sx(frac * x_max),
            H - MARGIN + 16.0,
            frac * x_max
        );
    }

    for (i, (policy, _, n, curve)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut path = String::new();
        for (t, p) in curve.thresholds.iter().zip(&curve.estimates) {
            let _ = write!(path, "{},{} ", sx(*t), sy(*p));
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.trim_end()
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{policy} (n={n})</text>",
            W - MARGIN - 180.0,
            MARGIN + 16.0 * (i + 1) as f64
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use banditlab::{run_monte_carlo, Environment, PolicySpec};

    #[test]
    fn float_formatting_has_17_significant_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(fmt_f64(-0.0), "-0.0000000000000000e0");
        assert_eq!(fmt_f64(100.0), "1.0000000000000000e2");
    }

    #[test]
    fn env_id_fields_are_quoted() {
        assert_eq!(csv_field("ber(0.6),ber(0.5)"), "\"ber(0.6),ber(0.5)\"");
        assert_eq!(csv_field("ucb1(0.5)"), "ucb1(0.5)");
    }

    #[test]
    fn csv_headers_and_sorting() {
        let env = Environment::parse("dirac(0.6),dirac(0.5)").unwrap();
        let sets = vec![
            run_monte_carlo(
                &env,
                &PolicySpec::parse("ucb1(0.5)").unwrap(),
                None,
                &[4],
                2,
                0,
                1,
            )
            .unwrap(),
            run_monte_carlo(
                &env,
                &PolicySpec::parse("gclstar(0.6)").unwrap(),
                None,
                &[4],
                2,
                0,
                1,
            )
            .unwrap(),
        ];
        let regret = regret_csv(&sets);
        let mut lines = regret.lines();
        assert_eq!(
            lines.next().unwrap(),
            "policy,env_id,n,replication,regret,pseudo_regret"
        );
        // gclstar sorts before ucb1.
        assert!(lines.next().unwrap().starts_with("gclstar(0.6)"));

        let counts = counts_csv(&sets);
        assert_eq!(
            counts.lines().next().unwrap(),
            "policy,env_id,n,replication,arm,pulls"
        );
        // policy, env (quoted), n, replication, arm (1-based), pulls.
        assert!(counts
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("gclstar(0.6),\"dirac(0.6),dirac(0.5)\",4,0,1,"));
    }
}
