//! `shape4d`: command-line front end for the 4D shaping toolkit.
//!
//! Subcommands cover constellation inspection, GMI/MI sweeps, geometric
//! optimization, WDM fiber sweeps, and CCDM rate-loss tables. Every command
//! honors `--seed`, `--out`, and `--format`; identical invocations produce
//! byte-identical reports once `--no-timestamp` is passed.

mod commands;
mod error;
mod range;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Common;
use error::CliError;
use report::OutputFormat;

#[derive(Parser)]
#[command(
    name = "shape4d",
    version,
    about = "Toolkit for geometrically shaped four-dimensional modulation formats"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// RNG seed shared by every stochastic stage.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Write the report to this file (atomic rename) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report encoding.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Omit the timestamp metadata line so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Worker threads for grid sweeps (default: SHAPE4D_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Structure report for a built-in or saved constellation.
    Constellation(commands::constellation::ConstellationArgs),
    /// GMI and MI versus SNR over one or more formats.
    GmiSweep(commands::gmi_sweep::GmiSweepArgs),
    /// GMI-ascent refinement of a constellation at one SNR.
    Optimize(commands::optimize::OptimizeArgs),
    /// Split-step WDM link sweep over launch power or distance.
    FiberSweep(commands::fiber::FiberSweepArgs),
    /// CCDM rate loss and finite-length net rates for shaped blocks.
    RateLoss(commands::rate_loss::RateLossArgs),
}

/// `--threads` wins over `SHAPE4D_THREADS`; zero is rejected, absence means
/// rayon's default sizing.
fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("SHAPE4D_THREADS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                CliError::Usage(format!("SHAPE4D_THREADS=`{s}` is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = resolve_threads(cli.threads)? {
        // A second build attempt can only happen in-process; ignore it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let common = Common {
        seed: cli.seed,
        out: cli.out,
        format: match cli.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
        timestamp: !cli.no_timestamp,
        argv: std::env::args().collect(),
    };
    match cli.command {
        Command::Constellation(args) => commands::constellation::run(&args, &common),
        Command::GmiSweep(args) => commands::gmi_sweep::run(&args, &common),
        Command::Optimize(args) => commands::optimize::run(&args, &common),
        Command::FiberSweep(args) => commands::fiber::run(&args, &common),
        Command::RateLoss(args) => commands::rate_loss::run(&args, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
