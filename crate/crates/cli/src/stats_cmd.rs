//! `bicell stats` — histogram collection over freshly sampled diagrams.
//!
//! Draws `--N` diagrams of the requested length and genus and writes one
//! CSV per requested histogram kind into `--out-dir`, plus the manifest.
//! The run is reproducible: sample `i` comes from stream `i+1` of the
//! seeded generator, so neither `--threads` nor scheduling affect output.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};

use bicell::stats::{histogram_run, HistogramKind, RunMeta};

use crate::count::{table_hash, CountTarget};
use crate::manifest::{resolve_seed, RunManifest};
use crate::sample::run_pool;
use crate::{CliError, Family, MetaArgs};

#[derive(Args)]
pub struct StatsArgs {
    /// Total diagram length
    #[arg(long)]
    len: usize,
    /// Genus of the family
    #[arg(long)]
    g: usize,
    /// Number of diagrams to draw
    #[arg(long = "N")]
    num: u64,
    /// Seed; falls back to $BICELL_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Histogram kinds to collect (comma separated); all when omitted
    #[arg(long, value_enum, value_delimiter = ',')]
    which: Vec<WhichKind>,
    /// Directory the CSV files and manifest go to
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Size of the worker pool (does not affect the output bytes)
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    meta: MetaArgs,
}

/// CLI names for the histogram kinds; they match the CSV file stems.
#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum WhichKind {
    LoopLen,
    PkLoopLen,
    StackLen,
    BetaStackCount,
    StackCount,
}

impl From<WhichKind> for HistogramKind {
    fn from(which: WhichKind) -> Self {
        match which {
            WhichKind::LoopLen => HistogramKind::LoopLength,
            WhichKind::PkLoopLen => HistogramKind::PkLoopLength,
            WhichKind::StackLen => HistogramKind::StackLength,
            WhichKind::BetaStackCount => HistogramKind::BetaStackCount,
            WhichKind::StackCount => HistogramKind::StackCount,
        }
    }
}

pub fn run(args: StatsArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let (seed, seed_source) = resolve_seed(args.seed)?;
    let requested: Vec<HistogramKind> = if args.which.is_empty() {
        HistogramKind::ALL.to_vec()
    } else {
        // Deduplicate while keeping the canonical kind order.
        HistogramKind::ALL
            .into_iter()
            .filter(|kind| args.which.iter().any(|w| HistogramKind::from(*w) == *kind))
            .collect()
    };

    let meta = RunMeta {
        total_len: args.len,
        genus: args.g,
        samples: args.num,
        seed,
    };
    let results = run_pool(args.threads, || histogram_run(meta, &requested))??;

    fs::create_dir_all(&args.out_dir)?;
    let mut manifest = RunManifest::new(
        "stats",
        serde_json::json!({
            "len": args.len,
            "g": args.g,
            "N": args.num,
            "which": requested.iter().map(|k| k.file_stem()).collect::<Vec<_>>(),
            "out_dir": args.out_dir,
        }),
    );
    manifest.echo_config(args.meta.config.as_deref())?;
    manifest.seed = Some(seed);
    manifest.seed_source = Some(seed_source);
    manifest.threads = args.threads;
    manifest.count_table_sha256 = Some(table_hash(CountTarget {
        family: Family::Diagrams,
        genus: args.g,
        size: args.len,
    })?);

    for (kind, histogram) in &results {
        let path = args.out_dir.join(format!("{}.csv", kind.file_stem()));
        let mut file = fs::File::create(&path)?;
        histogram.write_csv(&mut file)?;
        manifest.add_output(&path)?;
    }
    let manifest_path = args
        .meta
        .manifest
        .clone()
        .unwrap_or_else(|| args.out_dir.join("manifest.json"));
    manifest.finish(started, &manifest_path)
}
