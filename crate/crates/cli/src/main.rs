//! `etef`: generate intensifying excitation functions by swarm-optimized
//! spectral matching, score existing records, sweep optimizer parameter
//! grids, and run nonlinear demand studies.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 i/o error.

// Same convention as the core crate: `!(x > 0.0)` rejects NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::CliError;

const DESK_CONFIG: &str = include_str!("../../../configs/desk.toml");
const PAPER_CONFIG: &str = include_str!("../../../configs/paper.toml");

#[derive(Parser)]
#[command(
    name = "etef",
    version,
    about = "Intensifying excitation functions: generation, scoring, and demand studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize an excitation by minimizing the running-spectrum mismatch
    Generate(GenerateArgs),
    /// Score an existing accelerogram against a configuration's target
    Evaluate(EvaluateArgs),
    /// Run a swarm for every row of a parameter grid CSV
    ScenarioGrid(ScenarioArgs),
    /// Scale inputs to one intensity, simulate the building, compare demands
    EdpStudy(EdpArgs),
}

/// Which run configuration to use: an explicit file or a bundled scale.
#[derive(Args)]
struct ConfigSource {
    /// Run configuration (TOML)
    #[arg(long, conflicts_with = "scale")]
    config: Option<PathBuf>,
    /// Bundled configuration when --config is absent
    #[arg(long, value_enum, default_value_t = Scale::Desk)]
    scale: Scale,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    /// Small signal and light swarm; finishes in seconds
    Desk,
    /// Full-size signal and swarm; expect very long runs
    Paper,
}

impl ConfigSource {
    /// Loads the selected configuration plus the directory that relative
    /// paths inside it resolve against.
    fn load(&self) -> Result<(RunConfig, PathBuf), CliError> {
        match &self.config {
            Some(path) => {
                let config = RunConfig::load(path)?;
                let base = path
                    .parent()
                    .filter(|p| !p.as_os_str().is_empty())
                    .unwrap_or(Path::new("."))
                    .to_path_buf();
                Ok((config, base))
            }
            None => {
                let (text, origin) = match self.scale {
                    Scale::Desk => (DESK_CONFIG, "bundled desk configuration"),
                    Scale::Paper => (PAPER_CONFIG, "bundled paper-scale configuration"),
                };
                Ok((RunConfig::from_toml(text, origin)?, PathBuf::from(".")))
            }
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "etef-out")]
    out: PathBuf,
    /// Worker thread count (defaults to the core count)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Accelerogram CSV (time_s, accel_g)
    etef: PathBuf,
    #[command(flatten)]
    source: ConfigSource,
    /// Output directory
    #[arg(long, default_value = "evaluate-out")]
    out: PathBuf,
    /// Write a period-wise slice at this time (repeatable), seconds
    #[arg(long = "slice-time")]
    slice_times: Vec<f64>,
    /// Write a time-wise slice at this period (repeatable), seconds
    #[arg(long = "slice-period")]
    slice_periods: Vec<f64>,
    /// Worker thread count (defaults to the core count)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario grid CSV with header n_pop,mode,omega,xi,c1,c2
    grid: PathBuf,
    #[command(flatten)]
    source: ConfigSource,
    /// Base seed override; row i runs with base + i
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "scenario-out")]
    out: PathBuf,
    /// Worker thread count (defaults to the core count)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct EdpArgs {
    /// Building model (TOML)
    #[arg(long)]
    model: PathBuf,
    /// Directory of ground-motion CSVs
    #[arg(long)]
    inputs: PathBuf,
    /// Candidate excitation CSV, compared against the motion median (repeatable)
    #[arg(long = "etef")]
    etefs: Vec<PathBuf>,
    /// Spectral acceleration everything is scaled to at T1, g
    #[arg(long, default_value_t = 0.1)]
    intensity: f64,
    /// Oscillator damping ratio for the scaling spectrum
    #[arg(long, default_value_t = 0.05)]
    damping: f64,
    /// Output directory
    #[arg(long, default_value = "edp-out")]
    out: PathBuf,
    /// Worker thread count (defaults to the core count)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => {
            init_threads(args.threads)?;
            let (config, base) = args.source.load()?;
            commands::generate::run(&config, &base, args.seed, &args.out)
        }
        Command::Evaluate(args) => {
            init_threads(args.threads)?;
            let (config, base) = args.source.load()?;
            commands::evaluate::run(
                &args.etef,
                &config,
                &base,
                &args.out,
                &args.slice_times,
                &args.slice_periods,
            )
        }
        Command::ScenarioGrid(args) => {
            init_threads(args.threads)?;
            let (config, base) = args.source.load()?;
            commands::scenario::run(&args.grid, &config, &base, args.seed, &args.out)
        }
        Command::EdpStudy(args) => {
            init_threads(args.threads)?;
            commands::edp::run(
                &args.model,
                &args.inputs,
                &args.etefs,
                args.intensity,
                args.damping,
                &args.out,
            )
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    Ok(())
}
