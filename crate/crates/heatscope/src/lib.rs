//! Experiment runner around `heatscope-core`: JSON configs, deterministic
//! sweeps, CSV and JSON result files, and the `heatscope` command line.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use crate::config::{ExperimentConfig, Kind};
use crate::error::{ErrorClass, RunError};
use crate::output::{write_record, write_timing, Format};
use crate::runner::{run, RunOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Both,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Both => Format::Both,
        }
    }
}

/// Numerical experiments on spectral inequalities and heat observability.
#[derive(Clone, Debug, Parser)]
#[command(name = "heatscope", version)]
pub struct Cli {
    /// gamma, remez, spectral, product_spectral, heat_obs, point_obs,
    /// nodal_demo, lr_chain, product_obs or diophantine
    pub kind: String,
    /// JSON experiment config
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: the config's output.dir, else `out`)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Both)]
    pub format: FormatArg,
}

/// Whether `HEATSCOPE_MODE` asks for warnings to be errors.
pub fn strict_from_env() -> bool {
    std::env::var("HEATSCOPE_MODE").is_ok_and(|v| v.eq_ignore_ascii_case("strict"))
}

/// Runs one command line invocation and returns the files written.
pub fn execute(cli: &Cli, strict: bool) -> Result<Vec<PathBuf>, RunError> {
    let kind: Kind = cli.kind.parse().map_err(|m: String| RunError::new(ErrorClass::UnknownKind, m))?;
    if cli.threads == 0 {
        return Err(RunError::new(ErrorClass::Usage, "--threads must be at least 1"));
    }
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| RunError::new(ErrorClass::ConfigRead, format!("{}: {e}", cli.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)
        .map_err(|e| RunError::new(ErrorClass::ConfigRead, format!("{}: {e}", cli.config.display())))?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    cfg.kind.get_or_insert(kind);
    let started = Instant::now();
    let record = run(&cfg, kind, &RunOptions { threads: cli.threads, strict })?;
    let seconds = started.elapsed().as_secs_f64();
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut written = write_record(&record, &dir, cli.format.into())?;
    written.push(write_timing(&record, &dir, seconds, cli.threads)?);
    Ok(written)
}
