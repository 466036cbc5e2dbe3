//! Experiment runner for the `alphaeta` command.
//!
//! Every subcommand reads its table from an optional TOML config, writes CSV
//! and JSON artifacts to the output directory and finishes with
//! `manifest.json`. Outputs other than the manifest's timing field are a
//! pure function of the config and the master seed.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use rand::Rng;

mod commands;
pub mod config;
pub mod output;

pub use config::{ConfigError, ExperimentConfig};

/// The bundled example cipher table.
pub const EXAMPLE_TABLE: &str = include_str!("../data/example_table.toml");
/// Column documentation for every CSV the runner writes.
pub const CSV_SCHEMA: &str = include_str!("../data/csv_schema.toml");

#[derive(Debug, Parser)]
#[command(name = "alphaeta", version, about = "αη quantum-noise cipher simulator and cryptanalysis toolkit")]
pub struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for every random substream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bob and Eve bit error sweeps over S, M and η.
    Simulate,
    /// Known-plaintext search, half-circle error, individual attack, randomization.
    Attack,
    /// Exact entropy profile and Γ, Λ of a cipher table.
    Analyze,
    /// Closed-form bounds.
    Bounds,
    /// Homophonic code construction, checks and binary filters.
    Homophonic(HomophonicArgs),
    /// Key-assisted wedge decoding and the non-reduction certificate.
    Nishioka,
}

#[derive(Debug, Args)]
pub struct HomophonicArgs {
    /// Encode a file of symbol bytes into big-endian blocks.
    #[arg(long, num_args = 2, value_names = ["IN", "OUT"], conflicts_with = "decode")]
    pub encode: Option<Vec<PathBuf>>,
    /// Decode a block file back into symbol bytes.
    #[arg(long, num_args = 2, value_names = ["IN", "OUT"])]
    pub decode: Option<Vec<PathBuf>>,
}

/// Resolved run context shared by the subcommands.
pub(crate) struct Context {
    pub seed: Option<u64>,
    pub threads: usize,
}

impl Context {
    /// The master seed, or a config error for stochastic runs without one.
    pub fn require_seed(&self) -> std::result::Result<u64, ConfigError> {
        self.seed.ok_or_else(|| ConfigError {
            path: "seed".into(),
            message: "a master seed is required for stochastic runs (--seed or `seed` in the config)".into(),
        })
    }
}

/// Seed of the `index`-th task named `name`, derived from the master seed.
pub(crate) fn task_seed(master: u64, name: &str, index: u64) -> u64 {
    alphaeta::rng::substream(master, name, index).random()
}

/// Runs one subcommand. Configuration problems surface as [`ConfigError`].
pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => config::load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if cli.threads == Some(0) {
        return Err(ConfigError {
            path: "--threads".into(),
            message: "must be at least 1".into(),
        }
        .into());
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let ctx = Context {
        seed: cli.seed.or(config.seed),
        threads: pool.current_num_threads(),
    };
    pool.install(|| commands::dispatch(&cli, &config, &ctx))
}
