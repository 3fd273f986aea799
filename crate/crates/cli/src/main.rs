//! `mpemba`: batch runner for plain-vs-dressed relaxation under Davies maps.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mpemba", version, about = "Davies-map relaxation experiments with permutation dressing")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Write outputs here instead of the configured directory.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the Liouvillian spectrum, one record per mode.
    Spectrum { config: PathBuf },
    /// Relax plain and dressed states; write the trajectory CSV and crossover report.
    Run { config: PathBuf },
    /// Compare the two-level evolution with its closed forms.
    Validate {
        config: PathBuf,
        /// Coupling used by the closed-form side only (negative control).
        #[arg(long)]
        corrupt_gamma: Option<f64>,
    },
    /// Per-mode overlaps of the plain and dressed states.
    Suppression { config: PathBuf },
}

fn load(path: &PathBuf, output_dir: &Option<PathBuf>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(dir) = output_dir {
        cfg.output.directory = dir.clone();
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Spectrum { config } => commands::spectrum(&load(config, &cli.output_dir)?),
        Command::Run { config } => commands::run(&load(config, &cli.output_dir)?),
        Command::Validate { config, corrupt_gamma } => {
            if let Some(g) = corrupt_gamma {
                if !(*g > 0.0 && g.is_finite()) {
                    return Err(CliError::Config(format!("--corrupt-gamma must be positive, got {g}")));
                }
            }
            commands::validate(&load(config, &cli.output_dir)?, *corrupt_gamma)
        }
        Command::Suppression { config } => commands::suppression(&load(config, &cli.output_dir)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
