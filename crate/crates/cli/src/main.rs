//! Command-line driver: reproducible spectral sampling of truncated Haar
//! unitaries, comparison statistics, rate-functional evaluation,
//! equilibrium solving, and normalizing-constant tables.
//!
//! Exit codes: 0 success, 2 validation failure, 3 numerical failure,
//! 4 i/o failure.

mod commands;
mod dataset;
mod error;
mod manifest;
mod numfmt;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::AppResult;

#[derive(Debug, Parser)]
#[command(
    name = "haartrunc",
    version,
    about = "Spectra of truncated Haar unitary matrices: sampling, statistics, \
             rate functional, equilibrium measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw truncated-unitary spectra into a JSON-lines dataset
    Sample(SampleArgs),
    /// Compare a dataset's pooled spectra against the limit law
    Compare(CompareArgs),
    /// Evaluate the rate functional on a dataset or a radial density table
    Rate(RateArgs),
    /// Solve a radial weighted equilibrium problem and certify it
    Equilibrium(EquilibriumArgs),
    /// Tabulate the normalizing-constant convergence toward B(lambda)
    Constants(ConstantsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    fn as_str(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Master seed; every sample index derives its own substream from it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core); never changes the output bytes
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output file (a `<out>.manifest.json` sibling records the run)
    #[arg(long)]
    out: PathBuf,
    /// Output format (datasets are always JSON lines)
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Ambient unitary dimension (exclusive with --lambda)
    #[arg(long, conflicts_with = "lambda")]
    m: Option<usize>,
    /// Aspect ratio; the ambient dimension becomes round(lambda * n)
    #[arg(long)]
    lambda: Option<f64>,
    /// Truncation dimension
    #[arg(long)]
    n: usize,
    /// Number of independent draws
    #[arg(long)]
    samples: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// JSON-lines dataset produced by `sample`
    #[arg(long)]
    dataset: PathBuf,
    /// Aspect ratio of the reference limit law
    #[arg(long)]
    lambda: f64,
    /// Number of radii in the CDF comparison grid
    #[arg(long, default_value_t = 512)]
    grid_size: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct RateArgs {
    /// Pool a dataset's eigenvalues as the input measure
    #[arg(long, conflicts_with = "measure")]
    dataset: Option<PathBuf>,
    /// Radial density table (CSV: radius,density)
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Aspect ratio entering the functional
    #[arg(long)]
    lambda: f64,
    /// Optional cap applied to the pair kernel before integration
    #[arg(long)]
    clamp: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct EquilibriumArgs {
    /// Built-in field for this aspect ratio (exclusive with --weight-table)
    #[arg(long, conflicts_with = "weight_table")]
    lambda: Option<f64>,
    /// Tabulated radial field (CSV: radius,q,q_prime)
    #[arg(long)]
    weight_table: Option<PathBuf>,
    /// Bisection tolerance for the support radii
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Number of radii in the certificate grid
    #[arg(long, default_value_t = 4096)]
    grid_size: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    /// Aspect ratio
    #[arg(long)]
    lambda: f64,
    /// Truncation sizes, comma separated; the table uses m = round(lambda n)
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

fn run(cli: &Cli, started: Instant) -> AppResult<()> {
    match &cli.command {
        Command::Sample(args) => commands::run_sample(args, started),
        Command::Compare(args) => commands::run_compare(args, started),
        Command::Rate(args) => commands::run_rate(args, started),
        Command::Equilibrium(args) => commands::run_equilibrium(args, started),
        Command::Constants(args) => commands::run_constants(args, started),
    }
}

fn main() {
    let started = Instant::now();
    let cli = Cli::parse();
    if let Err(e) = run(&cli, started) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
