//! `bicell` — command-line toolkit for two-backbone interaction structures
//! of fixed topological genus.
//!
//! Subcommands cover the whole pipeline: exact count tables (`count`),
//! uniform random generation (`sample`), the slicing surgery between maps
//! and plane-tree pairs (`decompose`/`rebuild`), histogram collection over
//! sampled structures (`stats`) and self-contained consistency suites
//! (`verify`).  Every run that produces files also writes a JSON manifest
//! recording the full configuration, content hashes of the outputs and of
//! the count tables the run rested on; stdout-only commands accept
//! `--manifest` to request the same record without polluting their stream.
//!
//! Exit codes: 0 on success, 1 when a verification fails (`--cross-check`
//! mismatch or a failing `verify` suite), 2 for usage and domain errors.

mod count;
mod manifest;
mod sample;
mod stats_cmd;
mod trace_cmd;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Failures sorted by exit-code policy: domain and I/O problems exit
/// with 2, a failed consistency check exits with 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn usage(err: impl std::fmt::Display) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::usage(err)
    }
}

impl From<bicell::ParseError> for CliError {
    fn from(err: bicell::ParseError) -> Self {
        CliError::usage(err)
    }
}

impl From<bicell::MapError> for CliError {
    fn from(err: bicell::MapError) -> Self {
        CliError::usage(err)
    }
}

impl From<bicell::CountError> for CliError {
    fn from(err: bicell::CountError) -> Self {
        CliError::usage(err)
    }
}

impl From<bicell::SampleError> for CliError {
    fn from(err: bicell::SampleError) -> Self {
        CliError::usage(err)
    }
}

impl From<bicell::SurgeryError> for CliError {
    fn from(err: bicell::SurgeryError) -> Self {
        CliError::usage(err)
    }
}

#[derive(Parser)]
#[command(
    name = "bicell",
    version,
    about = "Exact counting, uniform sampling and analysis of two-backbone interaction structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print or dump exact count tables
    Count(count::CountArgs),
    /// Draw structures uniformly at random and write them to a file
    Sample(sample::SampleArgs),
    /// Slice a structure down to its plane-tree trace
    Decompose(trace_cmd::DecomposeArgs),
    /// Rebuild a structure from a decomposition trace
    Rebuild(trace_cmd::RebuildArgs),
    /// Sample structures and collect histograms over their features
    Stats(stats_cmd::StatsArgs),
    /// Run a built-in consistency suite
    Verify(verify::VerifyArgs),
}

/// Options shared by every subcommand: an optional TOML file echoed into
/// the manifest, and an explicit manifest destination.
#[derive(Args)]
pub struct MetaArgs {
    /// TOML file recorded verbatim in the run manifest (parameters still
    /// come from flags)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Where to write the JSON run manifest (defaults next to the outputs
    /// for file-producing commands; off otherwise)
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

/// Structure families the exact counters cover.
#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Planted plane trees by edge count
    Trees,
    /// Planted unicellular maps of fixed genus by edge count
    Uni,
    /// Planted bicellular maps of fixed genus by arc count
    Bi,
    /// Two-backbone diagrams of fixed genus by total length
    Diagrams,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(args) => count::run(args),
        Command::Sample(args) => sample::run(args),
        Command::Decompose(args) => trace_cmd::run_decompose(args),
        Command::Rebuild(args) => trace_cmd::run_rebuild(args),
        Command::Stats(args) => stats_cmd::run(args),
        Command::Verify(args) => verify::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
