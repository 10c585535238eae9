//! Experiment driver around the `banditlab` library: config parsing, the
//! `simulate`/`tail`/`sweep`/`verify` subcommands and the CSV/SVG reports.

pub mod commands;
pub mod config;
pub mod report;
