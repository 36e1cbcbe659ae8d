//! `bicell verify` — built-in consistency suites.
//!
//! Each suite prints one line per check and exits nonzero when any check
//! fails.  `counts` pits the exact counters against each other and against
//! brute force, `invariants` exercises the structural identities (surgery
//! round-trips, duality, loops, shapes), and `uniformity` chi-square-tests
//! the samplers against full enumerated supports at the 1% level.

use std::time::Instant;

use clap::{Args, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use bicell::counting::{
    bicellular_count, bicellular_count_paths, diagram_count_total, unicellular_count,
};
use bicell::duality::dual_inverse;
use bicell::oracle::{
    bucket_samples, chi_square_uniform, enumerate_diagrams, enumerate_planted_bicellular,
    enumerate_planted_unicellular,
};
use bicell::sampler::{DiagramSampler, StructureSampler};
use bicell::stats::{classify_loops, genus_zero_shapes, shape_project};
use bicell::surgery::{decompose_at, rebuild};

use crate::manifest::RunManifest;
use crate::{CliError, MetaArgs};

/// Fixed seed for the uniformity suite; the suite is deterministic.
const SUITE_SEED: u64 = 0xB1CE11;
/// Samples per support element in the uniformity suite.
const SAMPLES_PER_CELL: u64 = 25;

#[derive(Args)]
pub struct VerifyArgs {
    /// Which suite to run
    #[arg(long, value_enum)]
    suite: Suite,
    #[command(flatten)]
    meta: MetaArgs,
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    /// Structural identities: surgery round-trips, duality, loops, shapes
    Invariants,
    /// Samplers against enumerated supports, chi-square at the 1% level
    Uniformity,
    /// Exact counters against each other and against brute force
    Counts,
}

struct Outcome {
    name: &'static str,
    pass: bool,
    details: String,
}

impl Outcome {
    fn new(name: &'static str, pass: bool, details: impl Into<String>) -> Self {
        Outcome {
            name,
            pass,
            details: details.into(),
        }
    }
}

pub fn run(args: VerifyArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let outcomes = match args.suite {
        Suite::Invariants => invariants_suite(),
        Suite::Uniformity => uniformity_suite()?,
        Suite::Counts => counts_suite()?,
    };
    let mut failures = 0usize;
    for outcome in &outcomes {
        let verdict = if outcome.pass { "ok  " } else { "FAIL" };
        println!("{verdict} {} ({})", outcome.name, outcome.details);
        failures += usize::from(!outcome.pass);
    }
    if let Some(path) = &args.meta.manifest {
        let suite = match args.suite {
            Suite::Invariants => "invariants",
            Suite::Uniformity => "uniformity",
            Suite::Counts => "counts",
        };
        let mut manifest = RunManifest::new(
            "verify",
            serde_json::json!({ "suite": suite, "checks": outcomes.len(), "failures": failures }),
        );
        manifest.echo_config(args.meta.config.as_deref())?;
        manifest.finish(started, path)?;
    }
    if failures > 0 {
        return Err(CliError::Verification(format!(
            "{failures} of {} checks failed",
            outcomes.len()
        )));
    }
    Ok(())
}

fn counts_suite() -> Result<Vec<Outcome>, CliError> {
    let mut outcomes = Vec::new();

    let mut mismatches = 0usize;
    let mut cells = 0usize;
    for g in 0..=3 {
        for n in 0..=8 {
            cells += 1;
            if bicellular_count(g, n)? != bicellular_count_paths(g, n)? {
                mismatches += 1;
            }
        }
    }
    outcomes.push(Outcome::new(
        "bi-recursion-vs-path-sum",
        mismatches == 0,
        format!("g<=3, n<=8: {mismatches} mismatches over {cells} cells"),
    ));

    let mut mismatches = 0usize;
    let mut cells = 0usize;
    for n in 1..=5 {
        let by_genus = bucket_samples(enumerate_planted_bicellular(n).iter().map(|m| m.genus()));
        for g in 0..=n / 2 {
            cells += 1;
            let oracle = by_genus.get(&g).copied().unwrap_or(0);
            if bicellular_count(g, n)?.to_string() != oracle.to_string() {
                mismatches += 1;
            }
        }
    }
    outcomes.push(Outcome::new(
        "bi-vs-oracle",
        mismatches == 0,
        format!("n<=5, all genera: {mismatches} mismatches over {cells} cells"),
    ));

    let mut mismatches = 0usize;
    let mut cells = 0usize;
    for m in 0..=6 {
        let by_genus = bucket_samples(enumerate_planted_unicellular(m).iter().map(|u| u.genus()));
        for g in 0..=m / 2 {
            cells += 1;
            let oracle = by_genus.get(&g).copied().unwrap_or(0);
            if unicellular_count(g, m)?.to_string() != oracle.to_string() {
                mismatches += 1;
            }
        }
    }
    outcomes.push(Outcome::new(
        "uni-vs-oracle",
        mismatches == 0,
        format!("m<=6, all genera: {mismatches} mismatches over {cells} cells"),
    ));

    let mut mismatches = 0usize;
    let mut cells = 0usize;
    for len in 2..=8 {
        let by_genus = bucket_samples(
            enumerate_diagrams(len)
                .iter()
                .map(|d| d.genus().expect("enumerated diagrams are connected")),
        );
        for g in 0..=len / 4 {
            cells += 1;
            let oracle = by_genus.get(&g).copied().unwrap_or(0);
            if diagram_count_total(g, len)?.to_string() != oracle.to_string() {
                mismatches += 1;
            }
        }
    }
    outcomes.push(Outcome::new(
        "diagrams-vs-oracle",
        mismatches == 0,
        format!("len<=8, all genera: {mismatches} mismatches over {cells} cells"),
    ));

    Ok(outcomes)
}

fn invariants_suite() -> Vec<Outcome> {
    let mut outcomes = Vec::new();

    let mut bad = 0usize;
    let mut maps = 0usize;
    for n in 1..=4 {
        for map in enumerate_planted_bicellular(n) {
            maps += 1;
            if map.trisections().len() != 2 * (map.genus() + 1) {
                bad += 1;
            }
        }
    }
    outcomes.push(Outcome::new(
        "trisection-count",
        bad == 0,
        format!("n<=4: {bad} of {maps} maps off 2(g+1)"),
    ));

    let mut bad = 0usize;
    let mut trips = 0usize;
    for n in 1..=4 {
        for map in enumerate_planted_bicellular(n) {
            for (index, &tau) in map.trisections().iter().enumerate() {
                trips += 1;
                let ok = decompose_at(&map, index)
                    .and_then(|trace| rebuild(&trace))
                    .map(|(back, entry)| back == map && entry == tau)
                    .unwrap_or(false);
                bad += usize::from(!ok);
            }
        }
    }
    outcomes.push(Outcome::new(
        "surgery-round-trip",
        bad == 0,
        format!("n<=4, every entry trisection: {bad} of {trips} round-trips broken"),
    ));

    let mut bad = 0usize;
    let mut diagrams = 0usize;
    for len in 2..=8 {
        for diagram in enumerate_diagrams(len) {
            diagrams += 1;
            let ok = diagram
                .poincare_dual()
                .and_then(|(map, ctx)| {
                    let back = dual_inverse(&map, &ctx)?;
                    Ok(back == diagram && map.genus() == diagram.genus()?)
                })
                .unwrap_or(false);
            bad += usize::from(!ok);
        }
    }
    outcomes.push(Outcome::new(
        "dual-round-trip",
        bad == 0,
        format!("len<=8: {bad} of {diagrams} diagrams broken"),
    ));

    let mut bad = 0usize;
    let mut diagrams = 0usize;
    for len in 2..=8 {
        for diagram in enumerate_diagrams(len) {
            diagrams += 1;
            let ok = match (classify_loops(&diagram), diagram.genus()) {
                (Ok(records), Ok(genus)) => {
                    records.len() == diagram.arc_count() + 2 - 2 * genus
                }
                _ => false,
            };
            bad += usize::from(!ok);
        }
    }
    outcomes.push(Outcome::new(
        "loop-identity",
        bad == 0,
        format!("len<=8: {bad} of {diagrams} loop censuses off arcs+2-2g"),
    ));

    let shapes = genus_zero_shapes();
    let mut bad = 0usize;
    let mut diagrams = 0usize;
    for len in 2..=7 {
        for diagram in enumerate_diagrams(len) {
            if diagram.genus() != Ok(0) {
                continue;
            }
            diagrams += 1;
            let ok = shape_project(&diagram)
                .map(|shape| shapes.contains(&shape))
                .unwrap_or(false);
            bad += usize::from(!ok);
        }
    }
    outcomes.push(Outcome::new(
        "genus-zero-shapes",
        bad == 0,
        format!("len<=7: {bad} of {diagrams} projections outside the two shapes"),
    ));

    outcomes
}

fn uniformity_suite() -> Result<Vec<Outcome>, CliError> {
    let mut outcomes = Vec::new();

    let support: Vec<String> = enumerate_planted_bicellular(4)
        .iter()
        .filter(|m| m.genus() == 1)
        .map(|m| m.to_text())
        .collect();
    let sampler = StructureSampler::new(1, 4)?;
    let mut rng = ChaCha12Rng::seed_from_u64(SUITE_SEED);
    let draws = SAMPLES_PER_CELL * support.len() as u64;
    let buckets = bucket_samples((0..draws).map(|_| sampler.sample(&mut rng).to_text()));
    outcomes.push(check_uniform("matching-uniformity", &support, &buckets, draws));

    let support: Vec<String> = enumerate_diagrams(8)
        .iter()
        .filter(|d| d.genus() == Ok(1))
        .map(|d| d.to_text())
        .collect();
    let sampler = DiagramSampler::new(1, 8)?;
    let mut rng = ChaCha12Rng::seed_from_u64(SUITE_SEED);
    let draws = SAMPLES_PER_CELL * support.len() as u64;
    let buckets = bucket_samples((0..draws).map(|_| sampler.sample(&mut rng).to_text()));
    outcomes.push(check_uniform("diagram-uniformity", &support, &buckets, draws));

    Ok(outcomes)
}

fn check_uniform(
    name: &'static str,
    support: &[String],
    buckets: &std::collections::BTreeMap<String, u64>,
    draws: u64,
) -> Outcome {
    let stray = buckets.keys().filter(|k| !support.contains(k)).count();
    let counts: Vec<u64> = support
        .iter()
        .map(|k| buckets.get(k).copied().unwrap_or(0))
        .collect();
    let missed = counts.iter().filter(|&&c| c == 0).count();
    let report = chi_square_uniform(&counts);
    let pass = stray == 0 && missed == 0 && report.passes();
    Outcome::new(
        name,
        pass,
        format!(
            "{draws} draws over {} cells: chi2={:.1} (99% cutoff {:.1}), {missed} missed, {stray} stray",
            support.len(),
            report.statistic,
            report.critical_99,
        ),
    )
}
