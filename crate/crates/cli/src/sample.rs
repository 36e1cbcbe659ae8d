//! `bicell sample` — uniform random generation of maps and diagrams.
//!
//! Writes `--N` structures to `--out` (matchings as blank-line-separated
//! map blocks, diagrams one per line) plus a JSON manifest.  Output is a
//! pure function of the seed: structure `i` is drawn from stream `i+1` of
//! a counter-mode generator, so the file is identical for any `--threads`.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use bicell::sampler::{DiagramSampler, StructureSampler};

use crate::count::{table_hash, CountTarget};
use crate::manifest::{manifest_path_for, resolve_seed, RunManifest};
use crate::{CliError, Family, MetaArgs};

#[derive(Args)]
pub struct SampleArgs {
    /// What to sample: whole maps or chord diagrams
    #[arg(long, value_enum)]
    mode: Mode,
    /// Genus of the family
    #[arg(long)]
    g: usize,
    /// Arc count (matching mode)
    #[arg(long)]
    n: Option<usize>,
    /// Total diagram length (diagram mode)
    #[arg(long)]
    len: Option<usize>,
    /// Number of structures to draw
    #[arg(long = "N")]
    num: u64,
    /// Seed; falls back to $BICELL_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Output file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Size of the worker pool (does not affect the output bytes)
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    meta: MetaArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Planted bicellular maps with a fixed arc count
    Matching,
    /// Two-backbone diagrams with a fixed total length
    Diagram,
}

pub fn run(args: SampleArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let (seed, seed_source) = resolve_seed(args.seed)?;

    let stream_rng = |index: u64| {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(index + 1);
        rng
    };
    let (texts, table) = match args.mode {
        Mode::Matching => {
            if args.len.is_some() {
                return Err(CliError::Usage("--len does not apply to matchings".into()));
            }
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("--n is required in matching mode".into()))?;
            let sampler = StructureSampler::new(args.g, n)?;
            let texts = run_pool(args.threads, || {
                (0..args.num)
                    .into_par_iter()
                    .map(|i| sampler.sample(&mut stream_rng(i)).to_text())
                    .collect::<Vec<_>>()
            })?;
            let table = CountTarget {
                family: Family::Bi,
                genus: args.g,
                size: n,
            };
            (texts, table)
        }
        Mode::Diagram => {
            if args.n.is_some() {
                return Err(CliError::Usage("--n does not apply to diagrams".into()));
            }
            let len = args
                .len
                .ok_or_else(|| CliError::Usage("--len is required in diagram mode".into()))?;
            let sampler = DiagramSampler::new(args.g, len)?;
            let texts = run_pool(args.threads, || {
                (0..args.num)
                    .into_par_iter()
                    .map(|i| sampler.sample(&mut stream_rng(i)).to_text() + "\n")
                    .collect::<Vec<_>>()
            })?;
            let table = CountTarget {
                family: Family::Diagrams,
                genus: args.g,
                size: len,
            };
            (texts, table)
        }
    };

    // Matching blocks are separated by a blank line; diagram lines carry
    // their own terminator.
    let body = match args.mode {
        Mode::Matching => texts.join("\n"),
        Mode::Diagram => texts.concat(),
    };
    fs::write(&args.out, &body)?;

    let mut manifest = RunManifest::new(
        "sample",
        serde_json::json!({
            "mode": match args.mode { Mode::Matching => "matching", Mode::Diagram => "diagram" },
            "g": args.g,
            "n": args.n,
            "len": args.len,
            "N": args.num,
            "out": args.out,
        }),
    );
    manifest.echo_config(args.meta.config.as_deref())?;
    manifest.seed = Some(seed);
    manifest.seed_source = Some(seed_source);
    manifest.threads = args.threads;
    manifest.count_table_sha256 = Some(table_hash(table)?);
    manifest.add_output(&args.out)?;
    manifest.finish(started, &manifest_path_for(&args.meta, &args.out))?;
    Ok(())
}

/// Runs `work` on a dedicated pool when `--threads` was given, otherwise
/// on the global one.
pub fn run_pool<T: Send>(
    threads: Option<usize>,
    work: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        Some(t) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(CliError::usage)?
            .install(work)),
        None => Ok(work()),
    }
}
