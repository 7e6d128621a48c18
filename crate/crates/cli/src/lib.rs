//! Batch experiment driver: reads a JSON config, runs one experiment, writes
//! CSV tables and a JSON summary with pass/fail per assertion.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;
pub use report::{Assertion, Relation, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] halfball_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use halfball_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::NonConvergence { .. }) => 3,
            CliError::Core(E::InvalidKernel(_) | E::NonIntegrable(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Symbol bounds over kernels, orientations and horizons.
    Symbols,
    /// Steady Stokes solve with residual and stability checks.
    Stokes,
    /// Unsteady Stokes trajectory.
    StokesEvolve,
    /// Helmholtz decomposition in 2D and 3D.
    Helmholtz,
    /// Div-curl system and Friedrichs ratio.
    Divcurl,
    /// Navier energy identity and Korn bound.
    Navier,
    /// Navier wave trajectory.
    NavierEvolve,
    /// One-dimensional ρ kernel suite and doubly nonlocal factorization.
    #[command(name = "energy-1d")]
    Energy1d,
    /// δ-convergence tables and slopes.
    Convergence,
    /// Spectral identities and spectral-vs-quadrature comparisons.
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Symbols => "symbols",
            Command::Stokes => "stokes",
            Command::StokesEvolve => "stokes-evolve",
            Command::Helmholtz => "helmholtz",
            Command::Divcurl => "divcurl",
            Command::Navier => "navier",
            Command::NavierEvolve => "navier-evolve",
            Command::Energy1d => "energy-1d",
            Command::Convergence => "convergence",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "halfball", version, about = "Half-ball nonlocal operator experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long, global = true, env = "HALFBALL_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true, env = "HALFBALL_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "HALFBALL_THREADS")]
    pub threads: Option<usize>,
    /// Random seed (overrides the config).
    #[arg(long, global = true, env = "HALFBALL_SEED")]
    pub seed: Option<u64>,
    /// Tolerance override, e.g. `quad.tol=1e-12`; repeatable.
    #[arg(
        long = "tol-override",
        global = true,
        env = "HALFBALL_TOL_OVERRIDE",
        value_delimiter = ','
    )]
    pub tol_override: Vec<String>,
}

/// Loads, overrides and validates the config for `cli`.
pub fn prepare(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::from_json("{}")?,
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    for o in &cli.tol_override {
        config.apply_override(o)?;
    }
    if let Some(dir) = &cli.out {
        if dir.exists() && !dir.is_dir() {
            return Err(CliError::Config(format!(
                "output path {} is not a directory",
                dir.display()
            )));
        }
    }
    config.validate(cli.command.name())?;
    Ok(config)
}

pub fn run_experiment(command: Command, config: &ExperimentConfig) -> Result<Report, CliError> {
    use experiments::*;
    match command {
        Command::Symbols => symbols::run(config),
        Command::Stokes => stokes::run(config),
        Command::StokesEvolve => stokes::run_evolve(config),
        Command::Helmholtz => helmholtz::run(config),
        Command::Divcurl => divcurl::run(config),
        Command::Navier => navier::run(config),
        Command::NavierEvolve => navier::run_evolve(config),
        Command::Energy1d => energy1d::run(config),
        Command::Convergence => convergence::run(config),
        Command::Oracle => oracle::run(config),
    }
}

/// Full invocation; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    match try_execute(cli) {
        Ok(report) => {
            for a in &report.assertions {
                println!("{}", a.line());
            }
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("halfball: {e}");
            e.exit_code()
        }
    }
}

fn try_execute(cli: &Cli) -> Result<Report, CliError> {
    let config = prepare(cli)?;
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(k) => {
            // A second initialization in the same process keeps the first pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            k
        }
        None => rayon::current_num_threads(),
    };
    let start = Instant::now();
    let report = run_experiment(cli.command, &config)?;
    let wall = start.elapsed().as_secs_f64();
    let name = config
        .output
        .name
        .clone()
        .or_else(|| {
            cli.config
                .as_ref()
                .and_then(|p| p.file_stem())
                .map(|s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_else(|| cli.command.name().to_string());
    let dir = config.out_dir(cli.out.as_deref());
    let written = report::write_artifacts(&report, &config, cli.command.name(), &name, &dir, wall, threads)?;
    for p in written {
        log::info!("wrote {}", p.display());
    }
    Ok(report)
}
