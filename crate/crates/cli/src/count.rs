//! `bicell count` — exact count values and CSV tables.
//!
//! Prints the single requested count to stdout, or with `--out` dumps the
//! whole table up to the requested size.  `--cross-check` recomputes the
//! value along every independent route available (genus recursion,
//! path-sum, brute-force enumeration below the size guards) and fails
//! with exit code 1 unless they all agree.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;

use bicell::counting::{
    bicellular_count, bicellular_count_paths, diagram_count_total, diagram_counts,
    plane_tree_count, plane_tree_counts, unicellular_count,
};
use bicell::oracle::{enumerate_diagrams, enumerate_planted_bicellular, enumerate_planted_unicellular};

use crate::manifest::{manifest_path_for, sha256_hex, RunManifest};
use crate::{CliError, Family, MetaArgs};

/// Brute-force enumeration is only consulted up to these sizes.
const ORACLE_MAX_TREE_EDGES: usize = 6;
const ORACLE_MAX_UNI_EDGES: usize = 6;
const ORACLE_MAX_BI_ARCS: usize = 5;
const ORACLE_MAX_DIAGRAM_LEN: usize = 8;

#[derive(Args)]
pub struct CountArgs {
    /// Structure family to count
    #[arg(long, value_enum)]
    family: Family,
    /// Genus (required for uni, bi and diagrams)
    #[arg(long)]
    g: Option<usize>,
    /// Edge or arc count (trees, uni, bi)
    #[arg(long)]
    n: Option<usize>,
    /// Total diagram length (diagrams)
    #[arg(long)]
    len: Option<usize>,
    /// Write the full count table as CSV instead of only printing the value
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Recompute along every independent route and compare
    #[arg(long)]
    cross_check: bool,
    #[command(flatten)]
    meta: MetaArgs,
}

/// Family plus validated size parameters.
#[derive(Copy, Clone)]
pub struct CountTarget {
    pub family: Family,
    pub genus: usize,
    pub size: usize,
}

impl CountTarget {
    fn resolve(args: &CountArgs) -> Result<Self, CliError> {
        let need = |value: Option<usize>, flag: &str| {
            value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this family")))
        };
        let forbid = |value: Option<usize>, flag: &str| match value {
            Some(_) => Err(CliError::Usage(format!(
                "--{flag} does not apply to this family"
            ))),
            None => Ok(()),
        };
        match args.family {
            Family::Trees => {
                forbid(args.len, "len")?;
                if args.g.unwrap_or(0) != 0 {
                    return Err(CliError::Usage(
                        "plane trees have genus zero; drop --g".into(),
                    ));
                }
                Ok(CountTarget {
                    family: Family::Trees,
                    genus: 0,
                    size: need(args.n, "n")?,
                })
            }
            Family::Uni | Family::Bi => {
                forbid(args.len, "len")?;
                Ok(CountTarget {
                    family: args.family,
                    genus: need(args.g, "g")?,
                    size: need(args.n, "n")?,
                })
            }
            Family::Diagrams => {
                forbid(args.n, "n")?;
                Ok(CountTarget {
                    family: Family::Diagrams,
                    genus: need(args.g, "g")?,
                    size: need(args.len, "len")?,
                })
            }
        }
    }

    fn family_name(&self) -> &'static str {
        match self.family {
            Family::Trees => "trees",
            Family::Uni => "uni",
            Family::Bi => "bi",
            Family::Diagrams => "diagrams",
        }
    }
}

/// The count table as CSV, exactly as `count --out` writes it.  Shared
/// with `sample` and `stats`, which hash this text into their manifests.
pub fn table_csv(target: CountTarget) -> Result<String, CliError> {
    let CountTarget { genus, size, .. } = target;
    let mut out = String::new();
    match target.family {
        Family::Trees => {
            out.push_str(&format!("# family=trees n={size}\nn,count\n"));
            for (m, count) in plane_tree_counts(size).iter().enumerate() {
                out.push_str(&format!("{m},{count}\n"));
            }
        }
        Family::Uni => {
            out.push_str(&format!("# family=uni g={genus} n={size}\nn,count\n"));
            for m in 0..=size {
                out.push_str(&format!("{m},{}\n", unicellular_count(genus, m)?));
            }
        }
        Family::Bi => {
            out.push_str(&format!("# family=bi g={genus} n={size}\nn,count\n"));
            for n in 0..=size {
                out.push_str(&format!("{n},{}\n", bicellular_count(genus, n)?));
            }
        }
        Family::Diagrams => {
            out.push_str(&format!("# family=diagrams g={genus} len={size}\narcs,count\n"));
            for (arcs, count) in diagram_counts(genus, size)? {
                out.push_str(&format!("{arcs},{count}\n"));
            }
        }
    }
    Ok(out)
}

/// Hash of the count table backing a `(family, genus, size)` run.
pub fn table_hash(target: CountTarget) -> Result<String, CliError> {
    Ok(sha256_hex(table_csv(target)?.as_bytes()))
}

/// The independent routes to the requested value, labelled.  `None` marks
/// a route that exists but was skipped by a size guard.
fn routes(target: CountTarget) -> Result<Vec<(&'static str, Option<String>)>, CliError> {
    let CountTarget { genus, size, .. } = target;
    let mut routes = Vec::new();
    match target.family {
        Family::Trees => {
            routes.push(("recursion", Some(plane_tree_count(size).to_string())));
            routes.push((
                "oracle",
                (size <= ORACLE_MAX_TREE_EDGES).then(|| {
                    enumerate_planted_unicellular(size)
                        .iter()
                        .filter(|m| m.genus() == 0)
                        .count()
                        .to_string()
                }),
            ));
        }
        Family::Uni => {
            routes.push(("recursion", Some(unicellular_count(genus, size)?.to_string())));
            routes.push((
                "oracle",
                (size <= ORACLE_MAX_UNI_EDGES).then(|| {
                    enumerate_planted_unicellular(size)
                        .iter()
                        .filter(|m| m.genus() == genus)
                        .count()
                        .to_string()
                }),
            ));
        }
        Family::Bi => {
            routes.push(("recursion", Some(bicellular_count(genus, size)?.to_string())));
            routes.push((
                "path-sum",
                Some(bicellular_count_paths(genus, size)?.to_string()),
            ));
            routes.push((
                "oracle",
                (size <= ORACLE_MAX_BI_ARCS).then(|| {
                    enumerate_planted_bicellular(size)
                        .iter()
                        .filter(|m| m.genus() == genus)
                        .count()
                        .to_string()
                }),
            ));
        }
        Family::Diagrams => {
            routes.push((
                "recursion",
                Some(diagram_count_total(genus, size)?.to_string()),
            ));
            routes.push((
                "oracle",
                (size <= ORACLE_MAX_DIAGRAM_LEN).then(|| {
                    enumerate_diagrams(size)
                        .iter()
                        .filter(|d| d.genus().expect("enumerated diagrams are connected") == genus)
                        .count()
                        .to_string()
                }),
            ));
        }
    }
    Ok(routes)
}

pub fn run(args: CountArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let target = CountTarget::resolve(&args)?;

    if args.cross_check {
        let routes = routes(target)?;
        let mut seen: Option<&str> = None;
        let mut agree = true;
        for (label, value) in &routes {
            match value {
                Some(value) => {
                    println!("{label}: {value}");
                    agree &= *seen.get_or_insert(value) == value;
                }
                None => println!("{label}: skipped (size above brute-force guard)"),
            }
        }
        if !agree {
            return Err(CliError::Verification(
                "cross-check mismatch: the routes above disagree".into(),
            ));
        }
    } else {
        let value = match target.family {
            Family::Trees => plane_tree_count(target.size).to_string(),
            Family::Uni => unicellular_count(target.genus, target.size)?.to_string(),
            Family::Bi => bicellular_count(target.genus, target.size)?.to_string(),
            Family::Diagrams => diagram_count_total(target.genus, target.size)?.to_string(),
        };
        println!("{value}");
    }

    let table = table_csv(target)?;
    if let Some(out) = &args.out {
        fs::write(out, &table)?;
    }
    if args.out.is_some() || args.meta.manifest.is_some() {
        let mut manifest = RunManifest::new(
            "count",
            serde_json::json!({
                "family": target.family_name(),
                "g": target.genus,
                "size": target.size,
                "cross_check": args.cross_check,
                "out": args.out,
            }),
        );
        manifest.echo_config(args.meta.config.as_deref())?;
        manifest.count_table_sha256 = Some(sha256_hex(table.as_bytes()));
        if let Some(out) = &args.out {
            manifest.add_output(out)?;
        }
        let path = match &args.out {
            Some(out) => manifest_path_for(&args.meta, out),
            None => args.meta.manifest.clone().expect("manifest flag checked"),
        };
        manifest.finish(started, &path)?;
    }
    Ok(())
}
