//! `coopcov` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 simulation failure.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{FileConfig, Format, Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(coopcov::Error),
    #[error("simulation failure: {0}")]
    Simulation(coopcov::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Simulation(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "coopcov", version, about = "Coverage of cellular networks with pairwise base-station cooperation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed of the simulation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Dirty-paper coding at cooperating locations.
    #[arg(long, global = true)]
    dpc: bool,
    /// Use the coverage-maximising ρ.
    #[arg(long, global = true)]
    optimize_rho: bool,
    /// SINR model as PHASE:DISTANCE, e.g. exact-theta:exact.
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic coverage at the configured ρ: rho, qc, qc1, qc2.
    Coverage,
    /// Analytic coverage over a ρ grid: rho, qc, qc1, qc2.
    SweepRho,
    /// Analytic coverage over a threshold grid: T, qc_nocoop, qc_fullcoop, qc_opt, rho_star.
    SweepThreshold,
    /// Monte Carlo coverage estimates.
    Simulate {
        /// Add the analytic value and the z-score of the estimate.
        #[arg(long)]
        compare: bool,
    },
    /// SINR raster of one realization and the cooperation discs of its Delaunay pairs.
    Region {
        /// Seed of the realization; overrides --seed.
        #[arg(long)]
        realization_seed: Option<u64>,
    },
    /// Interference transforms and means on an s grid.
    Interference,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("COOPCOV_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("COOPCOV_THREADS = {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

/// Companion file of the disc table, next to the raster.
fn discs_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.discs.csv"))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut seed = cli.seed;
    if let Command::Region {
        realization_seed: Some(s),
    } = cli.command
    {
        seed = Some(s);
    }
    let over = Overrides {
        seed,
        dpc: cli.dpc,
        model: cli.model.clone(),
        format: cli.format,
        out: cli.out.clone(),
    };
    let cfg = RunConfig::resolve(file, over)?;
    let out = cfg.output_path.as_deref();
    match cli.command {
        Command::Coverage => emit(&commands::coverage(&cfg, cli.optimize_rho)?, out),
        Command::SweepRho => emit(&commands::sweep_rho(&cfg)?, out),
        Command::SweepThreshold => emit(&commands::sweep_threshold_cmd(&cfg, cli.optimize_rho)?, out),
        Command::Simulate { compare } => {
            let (text, warnings) = commands::simulate(&cfg, compare)?;
            for w in &warnings {
                eprintln!("{w}");
            }
            emit(&text, out)
        }
        Command::Region { .. } => {
            let (pixels, discs) = commands::region(&cfg)?;
            match (cfg.format, out) {
                (Format::Csv, Some(path)) => {
                    emit(&pixels, Some(path))?;
                    emit(&discs, Some(&discs_path(path)))
                }
                (Format::Csv, None) => emit(&format!("{pixels}\n{discs}"), None),
                (Format::Json, _) => emit(&pixels, out),
            }
        }
        Command::Interference => emit(&commands::interference(&cfg)?, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coopcov: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
