//! `bicell decompose` / `bicell rebuild` — the surgery as a filter pair.
//!
//! `decompose` reads one structure (a three-line map block, or a diagram
//! line whose connected core is then used), slices it down to a plane-tree
//! pair and prints the trace; `rebuild` replays a trace back into the map
//! text.  Piping one into the other reproduces a map file byte for byte.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;

use bicell::duality::Diagram2B;
use bicell::map::PlantedBicellularMap;
use bicell::surgery::{decompose, decompose_at, rebuild, DecompositionTrace};

use crate::manifest::RunManifest;
use crate::{CliError, MetaArgs};

#[derive(Args)]
pub struct DecomposeArgs {
    /// Structure file (map block or diagram line); `-` reads stdin
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Enter through the k-th trisection (boundary order) instead of the
    /// first one
    #[arg(long, value_name = "K")]
    trisection: Option<usize>,
    #[command(flatten)]
    meta: MetaArgs,
}

#[derive(Args)]
pub struct RebuildArgs {
    /// Trace file as printed by `decompose`; `-` reads stdin
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[command(flatten)]
    meta: MetaArgs,
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

/// Accepts either serialisation: a map block is recognised by its `alpha:`
/// line, anything else must be a single diagram line, which contributes
/// its connected core.
fn parse_structure(text: &str) -> Result<PlantedBicellularMap, CliError> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if lines.iter().any(|l| l.starts_with("alpha")) {
        return Ok(PlantedBicellularMap::from_text(text)?);
    }
    match lines.as_slice() {
        [line] => {
            let diagram = Diagram2B::from_text(line)?;
            let (map, _) = diagram.poincare_dual()?;
            Ok(map)
        }
        [] => Err(CliError::Usage("input holds no structure".into())),
        _ => Err(CliError::Usage(
            "input holds more than one structure; decompose one at a time".into(),
        )),
    }
}

fn optional_manifest(
    command: &'static str,
    config: serde_json::Value,
    meta: &MetaArgs,
    started: Instant,
) -> Result<(), CliError> {
    if let Some(path) = &meta.manifest {
        let mut manifest = RunManifest::new(command, config);
        manifest.echo_config(meta.config.as_deref())?;
        manifest.finish(started, path)?;
    }
    Ok(())
}

pub fn run_decompose(args: DecomposeArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let map = parse_structure(&read_input(&args.input)?)?;
    let trace = match args.trisection {
        Some(k) => decompose_at(&map, k)?,
        None => decompose(&map),
    };
    print!("{}", trace.to_text());
    optional_manifest(
        "decompose",
        serde_json::json!({ "in": args.input, "trisection": args.trisection }),
        &args.meta,
        started,
    )
}

pub fn run_rebuild(args: RebuildArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let trace = DecompositionTrace::from_text(&read_input(&args.input)?)?;
    let (map, _entry) = rebuild(&trace)?;
    print!("{}", map.to_text());
    optional_manifest(
        "rebuild",
        serde_json::json!({ "in": args.input }),
        &args.meta,
        started,
    )
}
