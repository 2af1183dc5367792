//! Command-line front end for the anisotropic walk engine.
//!
//! Exit codes: 0 when every claim passes or trends, 1 when a claim fails,
//! 2 for usage and input errors.

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anisowalk::sim::Engine;
use anisowalk::LevelCap;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "anisowalk", version, about = "Exact and Monte Carlo analysis of anisotropic lattice walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the averaged constants and condition warnings of a profile.
    ProfileInfo(ProfileInfoArgs),
    /// Exact return probabilities and the Green function over a step grid.
    Exact(ExactArgs),
    /// Simulate replicas and write their summaries.
    Simulate(SimulateArgs),
    /// Run every claim check and write report.json.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Profile JSON file.
    #[arg(long)]
    pub profile: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Report format; csv also writes a flattened report.csv.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProfileInfoArgs {
    /// Profile JSON file.
    #[arg(long)]
    pub profile: PathBuf,
    /// `json` prints the diagnostics as JSON instead of text.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Largest n in the one-sided averaging check.
    #[arg(long, default_value_t = 10_000)]
    pub heyde_n: usize,
    /// Length of the printed kappa/beta prefix tables.
    #[arg(long, default_value_t = 10)]
    pub j_max: usize,
    /// Largest relative gap allowed between the two one-sided averages.
    #[arg(long, default_value_t = anisowalk::profiles::DEFAULT_SIDES_TOLERANCE)]
    pub sides_tolerance: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExactArgs {
    #[command(flatten)]
    pub common: Common,
    /// Step counts, e.g. `2,4,10` or `1..50`.
    #[arg(long)]
    pub n_grid: String,
    /// AUTO or a positive integer.
    #[arg(long, default_value = "AUTO")]
    #[serde(serialize_with = "output::display")]
    pub level_cap: LevelCap,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Steps per replica.
    #[arg(long, short = 'n')]
    pub steps: u64,
    #[arg(long, default_value_t = 1000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sites whose local times are recorded, e.g. "(0,0);(0,1)".
    #[arg(long)]
    pub sites: Option<String>,
    #[arg(long, default_value = "direct")]
    #[serde(serialize_with = "output::display")]
    pub engine: Engine,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Values of N for the 2N-step return ratios.
    #[arg(long, default_value = "10,50,100,250,500")]
    pub n_grid: String,
    #[arg(long, default_value_t = 1000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "AUTO")]
    #[serde(serialize_with = "output::display")]
    pub level_cap: LevelCap,
    /// Site compared with the origin in the local-time ratio law.
    #[arg(long, default_value = "(0,1)")]
    pub sites: String,
    #[arg(long, default_value = "direct")]
    #[serde(serialize_with = "output::display")]
    pub engine: Engine,
    /// Relative tolerance of the ratio checks.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    ClaimFailed,
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Self::Usage(e.into())
            }
        }
    )*};
}

usage_from!(anyhow::Error, anisowalk::Error, std::io::Error, csv::Error, serde_json::Error);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::ProfileInfo(args) => commands::profile_info(&args),
        Command::Exact(args) => commands::exact(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Verify(args) => commands::verify(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ClaimFailed) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
