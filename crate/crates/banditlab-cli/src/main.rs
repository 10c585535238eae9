use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use banditlab_cli::commands::{self, verify::VerifyOptions};
use banditlab_cli::config::{self, Overrides};

#[derive(Parser)]
#[command(
    name = "banditlab",
    version,
    about = "Multi-armed bandit experiments: Monte Carlo regret data, tail statistics and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the config's replication count.
    #[arg(long)]
    reps: Option<u64>,

    /// Override the config's worker count (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Output directory for CSV and SVG files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured policies and write regret.csv and counts.csv.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the configured policies and write tail.csv and pmf.csv.
    Tail {
        #[command(flatten)]
        common: CommonArgs,
        /// Also render the tail curves to tail.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Run one UCB family across the configured exploration grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a built-in verification suite.
    Verify {
        /// One of: oracle, invariants, bounds, decay.
        suite: String,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Replications (each suite has its own default).
        #[arg(long)]
        reps: Option<u64>,

        #[arg(long, default_value_t = 0)]
        workers: usize,

        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { common } => {
            let experiment = config::load(&common.config, overrides(&common))?;
            commands::simulate::run(&experiment, &common.out)?;
            Ok(true)
        }
        Command::Tail { common, svg } => {
            let experiment = config::load(&common.config, overrides(&common))?;
            commands::tail::run(&experiment, &common.out, svg)?;
            Ok(true)
        }
        Command::Sweep { common } => {
            let experiment = config::load(&common.config, overrides(&common))?;
            commands::sweep::run(&experiment, &common.out)?;
            Ok(true)
        }
        Command::Verify {
            suite,
            seed,
            reps,
            workers,
            out,
        } => commands::verify::run(
            &suite,
            &VerifyOptions {
                seed,
                reps,
                workers,
            },
            &out,
        ),
    }
}

fn overrides(common: &CommonArgs) -> Overrides {
    Overrides {
        seed: common.seed,
        reps: common.reps,
        workers: common.workers,
    }
}
