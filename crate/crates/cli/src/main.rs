//! `prime-race`: prime races between residue classes, product-count
//! verification and composite censuses.

mod census;
mod failure;
mod plot;
mod products;
mod race;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "prime-race",
    version,
    about = "Prime races modulo 6 and friends"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stream primes and record delta = count5 - count1 against Np.
    Race(race::RaceArgs),
    /// Check the closed-form product counts against exhaustive enumeration.
    Products(products::ProductsArgs),
    /// Count primes, composites and the unit in each class up to a bound.
    Census(census::CensusArgs),
    /// Cross-validate the segmented sieve against the simple sieve and trial division.
    Verify(verify::VerifyArgs),
    /// Write a matplotlib script that plots delta from a race CSV.
    Plot(plot::PlotArgs),
}

/// Sieve tuning shared by the commands that stream primes.
#[derive(Debug, Clone, Args)]
pub struct SieveArgs {
    /// Integers per sieve segment (even, at least 2).
    #[arg(long = "segment-size", default_value_t = primerace_core::sieve::DEFAULT_SEGMENT_LENGTH)]
    pub segment_size: u64,
    /// Worker threads for segment sieving [default: available cores].
    #[arg(long, env = "PRIME_RACE_THREADS")]
    pub threads: Option<usize>,
}

impl SieveArgs {
    pub fn threads(&self) -> usize {
        self.threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

/// Where a command's table goes: a file, or standard output.
#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(), Failure> = match cli.command {
        Command::Race(args) => race::run(&args),
        Command::Products(args) => products::run(&args),
        Command::Census(args) => census::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Plot(args) => plot::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("prime-race: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
