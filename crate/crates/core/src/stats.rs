//! Loop and stack analytics over two-backbone diagrams.
//!
//! Each boundary component of a diagram's inflation — equivalently each
//! vertex of its dual map — is one *loop* of the structure.  A loop is
//! described by the arcs whose sides it runs along and by the backbone
//! gaps it owns: walking the boundary of face one or face two, the gap
//! entered after leaving half-edge `h` belongs to the vertex of `σ(h)`.
//! Loop length is therefore measured as the number of arc and plant sides
//! on the component plus the unpaired diagram positions inside its gaps;
//! paired endpoints are accounted for by the sides that span them, so the
//! per-structure totals obey `Σ degree = half-edges` and
//! `Σ (length − degree) = unpaired positions`.
//!
//! Two arcs *cross* when their endpoints interleave in the global
//! concatenated order.  On a single backbone that is exactly the classic
//! pseudoknot test and forces positive genus.  Between the backbones it
//! flags kissing-style entanglement instead: the annulus can wind an
//! exterior pair past each other, so a crossing exterior pair may still
//! embed at genus zero.  Crossing is a serialisation-level notion here,
//! not a genus certificate, and the pseudoknot classes below inherit
//! that reading.
//!
//! Shape projection strips a diagram down to its architecture: unpaired
//! positions, hairpins of size zero (same-backbone 1-arcs) and all but
//! one arc of every stack are dropped, and interior arcs are removed
//! whenever deletion provably leaves the genus unchanged — at genus zero
//! that is every interior arc, which is what collapses the family onto
//! the two classical genus-zero shapes.  Arc deletion never raises genus,
//! so the projection preserves it by construction.

use std::collections::{BTreeMap, BTreeSet};
use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::duality::Diagram2B;
use crate::sampler::DiagramSampler;
use crate::{MapError, SampleError};

/// Loop type by dual-vertex degree and plant incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LoopKind {
    /// Degree one: a single arc closing a run of unpaired positions.
    Hairpin,
    /// Degree two: the region between two arcs, as inside a stack.
    Interior,
    /// Degree three or more.
    Multi,
    /// Touches a plant half-edge: the loop runs along a backbone end.
    Exterior,
}

/// Whether a feature stays on one backbone or involves both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    /// Bounded by interior arcs only.
    Alpha,
    /// At least one exterior arc on the boundary.
    Beta,
}

/// Pseudoknot class of a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PkClass {
    /// No crossing pair among the bounding arcs.
    None,
    /// Crossing pair present, all bounding arcs on one backbone.
    AlphaPk,
    /// Crossing pair present and the loop touches an exterior arc.
    BetaPk,
}

/// One loop of a diagram: a vertex of the dual map together with the
/// diagram-level data of the boundary component around it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopRecord {
    /// Index of the dual vertex, in cycle order of `σ`.
    pub loop_id: usize,
    /// Dual-vertex degree: arc and plant sides on the component.
    pub degree: usize,
    pub kind: LoopKind,
    pub pk_class: PkClass,
    pub side: Side,
    /// Sides on the component plus unpaired positions in its gaps.
    pub length: usize,
    /// Distinct arcs bounding the loop, as global position pairs.
    pub arcs: Vec<(usize, usize)>,
}

/// A maximal run of parallel arcs `(i,j), (i+1,j−1), …` whose endpoints
/// are backbone-adjacent on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackRecord {
    /// Member arcs, outermost first.
    pub arcs: Vec<(usize, usize)>,
    /// Number of member arcs.
    pub length: usize,
    pub side: Side,
}

/// True when the endpoints of `a` and `b` interleave in global order.
pub fn arcs_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    let ((p, q), (r, s)) = if a.0 <= b.0 { (a, b) } else { (b, a) };
    p < r && r < q && q < s
}

/// Classifies every loop of the diagram.  One record per dual vertex,
/// so the record count is `(arcs + 2) − 2g`.
pub fn classify_loops(d: &Diagram2B) -> Result<Vec<LoopRecord>, MapError> {
    let (map, ctx) = d.poincare_dual()?;
    let sigma = map.sigma();
    let alpha = map.alpha();
    let gamma = map.gamma();
    let m = map.first_boundary_arity();
    let n = map.arc_count();
    let ((out1, tip1), (out2, tip2)) = map.plants();
    let is_plant = |h: usize| h == out1 || h == tip1 || h == out2 || h == tip2;
    let global = |h: usize| ctx.position(if h <= m { h } else { h - 2 });

    let cycles = sigma.cycles();
    let mut vertex_of = vec![0usize; map.half_edges()];
    for (vid, cycle) in cycles.iter().enumerate() {
        for &h in cycle {
            vertex_of[h] = vid;
        }
    }

    // Unpaired positions of the gap entered after each boundary step
    // h -> γ(h), credited to the vertex of σ(h).
    let mut owned_unpaired = vec![0usize; cycles.len()];
    for h in 0..map.half_edges() {
        if h == tip1 || h == tip2 {
            continue;
        }
        let next = gamma.apply(h);
        let left = if h == out1 {
            0
        } else if h == out2 {
            ctx.len1()
        } else {
            global(h)
        };
        let right = if next == tip1 {
            ctx.len1() + 1
        } else if next == tip2 {
            ctx.total_len() + 1
        } else {
            global(next)
        };
        owned_unpaired[vertex_of[sigma.apply(h)]] += right - left - 1;
    }

    let mut bounding: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); cycles.len()];
    for h in (1..=m).chain(m + 3..=2 * n + 2) {
        let p = global(h);
        let q = global(alpha.apply(h));
        bounding[vertex_of[h]].insert((p.min(q), p.max(q)));
    }

    let records = cycles
        .iter()
        .enumerate()
        .map(|(vid, cycle)| {
            let arcs: Vec<(usize, usize)> = bounding[vid].iter().copied().collect();
            let side = if arcs.iter().any(|&a| d.is_external(a)) {
                Side::Beta
            } else {
                Side::Alpha
            };
            let crossing = arcs
                .iter()
                .enumerate()
                .any(|(i, &a)| arcs[i + 1..].iter().any(|&b| arcs_cross(a, b)));
            let pk_class = match (crossing, side) {
                (false, _) => PkClass::None,
                (true, Side::Alpha) => PkClass::AlphaPk,
                (true, Side::Beta) => PkClass::BetaPk,
            };
            let kind = if cycle.iter().any(|&h| is_plant(h)) {
                LoopKind::Exterior
            } else {
                match cycle.len() {
                    1 => LoopKind::Hairpin,
                    2 => LoopKind::Interior,
                    _ => LoopKind::Multi,
                }
            };
            LoopRecord {
                loop_id: vid,
                degree: cycle.len(),
                kind,
                pk_class,
                side,
                length: cycle.len() + owned_unpaired[vid],
                arcs,
            }
        })
        .collect();
    Ok(records)
}

/// Splits the arcs into maximal stacks.  Every arc lands in exactly one
/// record, so the lengths sum to the arc count.
pub fn extract_stacks(d: &Diagram2B) -> Vec<StackRecord> {
    let set: BTreeSet<(usize, usize)> = d.pairs().iter().copied().collect();
    let len1 = d.len1();
    let same_backbone = |p: usize, q: usize| (p <= len1) == (q <= len1);
    let inner_of = |(p, q): (usize, usize)| -> Option<(usize, usize)> {
        (q >= p + 3
            && set.contains(&(p + 1, q - 1))
            && same_backbone(p, p + 1)
            && same_backbone(q - 1, q))
        .then(|| (p + 1, q - 1))
    };
    let mut stacks = Vec::new();
    for &(p, q) in d.pairs() {
        let continued = p > 1
            && set.contains(&(p - 1, q + 1))
            && same_backbone(p - 1, p)
            && same_backbone(q, q + 1);
        if continued {
            continue;
        }
        let mut arcs = vec![(p, q)];
        while let Some(next) = inner_of(*arcs.last().expect("stack is non-empty")) {
            arcs.push(next);
        }
        let side = if d.is_external((p, q)) {
            Side::Beta
        } else {
            Side::Alpha
        };
        stacks.push(StackRecord {
            length: arcs.len(),
            arcs,
            side,
        });
    }
    stacks
}

/// The two genus-zero shapes: the single exterior band, and the kissing
/// pair of exterior arcs.
pub fn genus_zero_shapes() -> [Diagram2B; 2] {
    let band = Diagram2B::new(1, 1, vec![(1, 2)]).expect("band shape is valid");
    let kissing = Diagram2B::new(2, 2, vec![(1, 3), (2, 4)]).expect("kissing shape is valid");
    [band, kissing]
}

/// Projects a diagram onto its shape: drops unpaired positions,
/// same-backbone 1-arcs and all but the outermost arc of each stack, and
/// removes interior arcs whose deletion keeps the genus, iterating to a
/// fixed point.  The projection is idempotent and genus-preserving.
pub fn shape_project(d: &Diagram2B) -> Result<Diagram2B, MapError> {
    let genus = d.genus()?;
    let mut cur = d.clone();
    loop {
        match project_step(&cur, genus) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
}

/// One reduction move, or None at a fixed point.
fn project_step(d: &Diagram2B, genus: usize) -> Option<Diagram2B> {
    let len1 = d.len1();
    let same_backbone = |p: usize, q: usize| (p <= len1) == (q <= len1);

    let unpaired = d.unpaired_positions();
    if !unpaired.is_empty() {
        return Some(without(d, &unpaired, &[]));
    }
    for &(p, q) in d.pairs() {
        if q == p + 1 && same_backbone(p, q) {
            return Some(without(d, &[p, q], &[(p, q)]));
        }
    }
    let set: BTreeSet<(usize, usize)> = d.pairs().iter().copied().collect();
    for &(p, q) in d.pairs() {
        if q >= p + 3
            && set.contains(&(p + 1, q - 1))
            && same_backbone(p, p + 1)
            && same_backbone(q - 1, q)
        {
            return Some(without(d, &[p + 1, q - 1], &[(p + 1, q - 1)]));
        }
    }
    for &(p, q) in d.pairs() {
        if d.is_external((p, q)) {
            continue;
        }
        // Deleting an arc never raises genus, so at genus zero every
        // interior arc goes; otherwise it goes only when a recount
        // shows the genus intact.
        let removable = genus == 0 || {
            let rest: Vec<(usize, usize)> = d
                .pairs()
                .iter()
                .copied()
                .filter(|&a| a != (p, q))
                .collect();
            Diagram2B::new(len1, d.len2(), rest)
                .expect("arc removal keeps a valid matching")
                .genus()
                == Ok(genus)
        };
        if removable {
            return Some(without(d, &[p, q], &[(p, q)]));
        }
    }
    None
}

/// The diagram with the given positions and arcs removed, renumbered.
fn without(d: &Diagram2B, positions: &[usize], arcs: &[(usize, usize)]) -> Diagram2B {
    let drop: BTreeSet<usize> = positions.iter().copied().collect();
    let keep: Vec<usize> = (1..=d.total_len()).filter(|p| !drop.contains(p)).collect();
    let mut renumber = BTreeMap::new();
    for (i, &p) in keep.iter().enumerate() {
        renumber.insert(p, i + 1);
    }
    let len1 = keep.iter().filter(|&&p| p <= d.len1()).count();
    let pairs: Vec<(usize, usize)> = d
        .pairs()
        .iter()
        .filter(|pq| !arcs.contains(pq))
        .map(|&(p, q)| (renumber[&p], renumber[&q]))
        .collect();
    Diagram2B::new(len1, keep.len() - len1, pairs).expect("renumbered arcs stay a matching")
}

/// The histogram families a run can emit, one output file each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HistogramKind {
    /// Loop length over all arc-bounded loops.
    LoopLength,
    /// Loop length over pseudoknot loops only.
    PkLoopLength,
    /// Stack length over all stacks.
    StackLength,
    /// Exterior-stack count per structure.
    BetaStackCount,
    /// Stack count per structure.
    StackCount,
}

impl HistogramKind {
    pub const ALL: [HistogramKind; 5] = [
        HistogramKind::LoopLength,
        HistogramKind::PkLoopLength,
        HistogramKind::StackLength,
        HistogramKind::BetaStackCount,
        HistogramKind::StackCount,
    ];

    /// Stable stem for the output file of this kind.
    pub fn file_stem(&self) -> &'static str {
        match self {
            HistogramKind::LoopLength => "loop_len",
            HistogramKind::PkLoopLength => "pk_loop_len",
            HistogramKind::StackLength => "stack_len",
            HistogramKind::BetaStackCount => "beta_stack_count",
            HistogramKind::StackCount => "stack_count",
        }
    }

    fn needs_loops(&self) -> bool {
        matches!(self, HistogramKind::LoopLength | HistogramKind::PkLoopLength)
    }

    fn needs_stacks(&self) -> bool {
        !self.needs_loops()
    }
}

/// Parameters of a histogram run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunMeta {
    pub total_len: usize,
    pub genus: usize,
    pub samples: u64,
    pub seed: u64,
}

/// Value-to-count bins plus the run parameters they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub meta: RunMeta,
    pub bins: BTreeMap<usize, u64>,
}

impl Histogram {
    /// Total number of recorded observations.
    pub fn observations(&self) -> u64 {
        self.bins.values().sum()
    }

    /// Sum of value × count over the bins.
    pub fn weighted_total(&self) -> u64 {
        self.bins.iter().map(|(&v, &c)| v as u64 * c).sum()
    }

    /// Writes `value,count` rows behind a `# meta:` header.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "# meta: len={} genus={} samples={} seed={}",
            self.meta.total_len, self.meta.genus, self.meta.samples, self.meta.seed
        )?;
        writeln!(out, "value,count")?;
        for (value, count) in &self.bins {
            writeln!(out, "{value},{count}")?;
        }
        Ok(())
    }
}

/// Samples `meta.samples` diagrams of genus `meta.genus` and total length
/// `meta.total_len`, tallies the requested histogram kinds, and returns
/// them in the order given.  Sampling is parallel with one counter-mode
/// stream per sample index, so the result is independent of scheduling.
pub fn histogram_run(
    meta: RunMeta,
    kinds: &[HistogramKind],
) -> Result<Vec<(HistogramKind, Histogram)>, SampleError> {
    let sampler = DiagramSampler::new(meta.genus, meta.total_len)?;
    let want_loops = kinds.iter().any(HistogramKind::needs_loops);
    let want_stacks = kinds.iter().any(HistogramKind::needs_stacks);
    let empty = || vec![BTreeMap::<usize, u64>::new(); kinds.len()];
    let bins = (0..meta.samples)
        .into_par_iter()
        .fold(empty, |mut acc, index| {
            let mut rng = ChaCha12Rng::seed_from_u64(meta.seed);
            rng.set_stream(index + 1);
            let diagram = sampler.sample(&mut rng);
            let loops = want_loops
                .then(|| classify_loops(&diagram).expect("sampled diagrams are connected"));
            let stacks = want_stacks.then(|| extract_stacks(&diagram));
            for (slot, kind) in kinds.iter().enumerate() {
                tally(&mut acc[slot], *kind, loops.as_deref(), stacks.as_deref());
            }
            acc
        })
        .reduce(empty, |mut left, right| {
            for (into, from) in left.iter_mut().zip(right) {
                for (value, count) in from {
                    *into.entry(value).or_insert(0) += count;
                }
            }
            left
        });
    Ok(kinds
        .iter()
        .zip(bins)
        .map(|(&kind, bins)| (kind, Histogram { meta, bins }))
        .collect())
}

fn tally(
    bins: &mut BTreeMap<usize, u64>,
    kind: HistogramKind,
    loops: Option<&[LoopRecord]>,
    stacks: Option<&[StackRecord]>,
) {
    let mut record = |value: usize| *bins.entry(value).or_insert(0) += 1;
    match kind {
        HistogramKind::LoopLength => {
            for l in loops.expect("loops computed for loop kinds") {
                if !l.arcs.is_empty() {
                    record(l.length);
                }
            }
        }
        HistogramKind::PkLoopLength => {
            for l in loops.expect("loops computed for loop kinds") {
                if l.pk_class != PkClass::None {
                    record(l.length);
                }
            }
        }
        HistogramKind::StackLength => {
            for s in stacks.expect("stacks computed for stack kinds") {
                record(s.length);
            }
        }
        HistogramKind::BetaStackCount => {
            let stacks = stacks.expect("stacks computed for stack kinds");
            record(stacks.iter().filter(|s| s.side == Side::Beta).count());
        }
        HistogramKind::StackCount => {
            record(stacks.expect("stacks computed for stack kinds").len());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_diagrams;

    fn diagram(text: &str) -> Diagram2B {
        Diagram2B::from_text(text).expect("test diagram parses")
    }

    #[test]
    fn minimal_band_has_three_loops() {
        let records = classify_loops(&diagram("1 1 | 1-2")).unwrap();
        assert_eq!(records.len(), 3);
        let big = records.iter().find(|r| r.degree == 4).unwrap();
        assert_eq!(big.kind, LoopKind::Exterior);
        assert_eq!(big.side, Side::Beta);
        assert_eq!(big.pk_class, PkClass::None);
        assert_eq!(big.length, 4);
        assert_eq!(big.arcs, vec![(1, 2)]);
        let tips: Vec<_> = records.iter().filter(|r| r.degree == 1).collect();
        assert_eq!(tips.len(), 2);
        for tip in tips {
            assert_eq!(tip.kind, LoopKind::Exterior);
            assert_eq!(tip.side, Side::Alpha);
            assert_eq!(tip.length, 1);
            assert!(tip.arcs.is_empty());
        }
    }

    #[test]
    fn nested_structure_classifies_by_hand() {
        // Backbone one carries an outer arc over a hairpin with one
        // unpaired position; backbone two hangs off two exterior arcs
        // with one unpaired position inside and one on the strand gap.
        let records = classify_loops(&diagram("5 3 | 1-8 2-4 5-7")).unwrap();
        assert_eq!(records.len(), 5);
        let by_degree = |deg: usize| {
            records
                .iter()
                .filter(move |r| r.degree == deg)
                .collect::<Vec<_>>()
        };
        let exterior = by_degree(4);
        assert_eq!(exterior.len(), 1);
        assert_eq!(exterior[0].kind, LoopKind::Exterior);
        assert_eq!(exterior[0].side, Side::Beta);
        assert_eq!(exterior[0].length, 5);
        let multi = by_degree(3);
        assert_eq!(multi.len(), 1);
        assert_eq!(multi[0].kind, LoopKind::Multi);
        assert_eq!(multi[0].side, Side::Beta);
        assert_eq!(multi[0].length, 3);
        assert_eq!(multi[0].arcs, vec![(1, 8), (2, 4), (5, 7)]);
        let singles = by_degree(1);
        assert_eq!(singles.len(), 3);
        let hairpin = singles
            .iter()
            .find(|r| r.kind == LoopKind::Hairpin)
            .unwrap();
        assert_eq!(hairpin.side, Side::Alpha);
        assert_eq!(hairpin.length, 2);
        assert_eq!(hairpin.arcs, vec![(2, 4)]);
        assert_eq!(records.iter().map(|r| r.degree).sum::<usize>(), 10);
    }

    #[test]
    fn stacked_band_yields_interior_loop() {
        let records = classify_loops(&diagram("2 2 | 1-4 2-3")).unwrap();
        let interior = records
            .iter()
            .find(|r| r.kind == LoopKind::Interior)
            .unwrap();
        assert_eq!(interior.degree, 2);
        assert_eq!(interior.side, Side::Beta);
        assert_eq!(interior.pk_class, PkClass::None);
    }

    #[test]
    fn kissing_band_is_a_beta_pseudoknot() {
        // A hairpin enclosing two parallel exterior arcs: planar on the
        // annulus, yet the exterior arcs interleave in global order.
        let records = classify_loops(&diagram("4 2 | 1-4 2-5 3-6")).unwrap();
        assert_eq!(records.len(), 5);
        let knotted: Vec<_> = records
            .iter()
            .filter(|r| r.pk_class == PkClass::BetaPk)
            .collect();
        assert_eq!(knotted.len(), 2);
        assert!(records.iter().all(|r| r.pk_class != PkClass::AlphaPk));
    }

    #[test]
    fn loop_census_obeys_euler_on_small_diagrams() {
        for total in 2..=6 {
            for d in enumerate_diagrams(total) {
                let genus = d.genus().unwrap();
                let records = classify_loops(&d).unwrap();
                assert_eq!(records.len(), d.arc_count() + 2 - 2 * genus, "{d}");
                let degree_sum: usize = records.iter().map(|r| r.degree).sum();
                assert_eq!(degree_sum, 2 * d.arc_count() + 4, "{d}");
                let slack: usize = records.iter().map(|r| r.length - r.degree).sum();
                assert_eq!(slack, d.unpaired_positions().len(), "{d}");
                for r in &records {
                    let crossing = r
                        .arcs
                        .iter()
                        .enumerate()
                        .any(|(i, &a)| r.arcs[i + 1..].iter().any(|&b| arcs_cross(a, b)));
                    assert_eq!(r.pk_class != PkClass::None, crossing, "{d}");
                    if genus == 0 {
                        assert_ne!(r.pk_class, PkClass::AlphaPk, "{d}");
                    }
                }
            }
        }
    }

    #[test]
    fn buried_interior_crossing_is_an_alpha_pseudoknot() {
        // The crossing pair (2,4),(3,5) sits under an arc on backbone
        // one, away from the exterior arc, so its multiloop stays on a
        // single backbone.
        let records = classify_loops(&diagram("8 2 | 1-6 2-4 3-5 7-9")).unwrap();
        assert_eq!(records.len(), 4);
        let knot = records
            .iter()
            .find(|r| r.pk_class == PkClass::AlphaPk)
            .expect("interior pseudoknot loop present");
        assert_eq!(knot.side, Side::Alpha);
        assert_eq!(knot.arcs, vec![(1, 6), (2, 4), (3, 5)]);
    }

    #[test]
    fn stacks_partition_the_arcs() {
        let lone = extract_stacks(&diagram("2 2 | 1-3"));
        assert_eq!(lone.len(), 1);
        assert_eq!(lone[0].length, 1);
        assert_eq!(lone[0].side, Side::Beta);

        let run = extract_stacks(&diagram("3 3 | 1-6 2-5 3-4"));
        assert_eq!(run.len(), 1);
        assert_eq!(run[0].arcs, vec![(1, 6), (2, 5), (3, 4)]);
        assert_eq!(run[0].length, 3);

        let one_backbone = extract_stacks(&diagram("6 0 | 1-6 2-5 3-4"));
        assert_eq!(one_backbone.len(), 1);
        assert_eq!(one_backbone[0].length, 3);
        assert_eq!(one_backbone[0].side, Side::Alpha);

        // Parallel exterior arcs do not stack, and neither does a nested
        // pair whose inner endpoints sit on different backbones.
        assert_eq!(extract_stacks(&diagram("4 2 | 1-4 2-5 3-6")).len(), 3);
        assert_eq!(extract_stacks(&diagram("1 5 | 1-5 2-4 3-6")).len(), 3);
    }

    #[test]
    fn stack_partition_sweeps_small_diagrams() {
        for total in 2..=6 {
            for d in enumerate_diagrams(total) {
                let stacks = extract_stacks(&d);
                let mut seen: Vec<(usize, usize)> = Vec::new();
                for s in &stacks {
                    assert_eq!(s.length, s.arcs.len(), "{d}");
                    seen.extend(&s.arcs);
                }
                seen.sort_unstable();
                assert_eq!(seen, d.pairs(), "stacks must partition {d}");
                let beta = stacks.iter().filter(|s| s.side == Side::Beta).count();
                assert!(beta <= stacks.len());
            }
        }
    }

    #[test]
    fn genus_zero_diagrams_project_onto_the_two_shapes() {
        let [band, kissing] = genus_zero_shapes();
        let mut seen_band = false;
        let mut seen_kissing = false;
        for total in 2..=7 {
            for d in enumerate_diagrams(total) {
                if d.genus().unwrap() != 0 {
                    continue;
                }
                let shape = shape_project(&d).unwrap();
                seen_band |= shape == band;
                seen_kissing |= shape == kissing;
                assert!(
                    shape == band || shape == kissing,
                    "unexpected genus-zero shape {shape} from {d}"
                );
            }
        }
        assert!(seen_band && seen_kissing);
    }

    #[test]
    fn shape_projection_is_idempotent_and_genus_preserving() {
        for total in 2..=6 {
            for d in enumerate_diagrams(total) {
                let genus = d.genus().unwrap();
                let shape = shape_project(&d).unwrap();
                assert_eq!(shape.genus().unwrap(), genus, "{d}");
                assert_eq!(shape_project(&shape).unwrap(), shape, "{d}");
            }
        }
    }

    #[test]
    fn histogram_run_is_deterministic_and_consistent() {
        let meta = RunMeta {
            total_len: 40,
            genus: 1,
            samples: 300,
            seed: 7,
        };
        let first = histogram_run(meta, &HistogramKind::ALL).unwrap();
        let second = histogram_run(meta, &HistogramKind::ALL).unwrap();
        assert_eq!(first, second);

        let by_kind = |kind: HistogramKind| {
            &first
                .iter()
                .find(|(k, _)| *k == kind)
                .expect("kind present")
                .1
        };
        let stack_len = by_kind(HistogramKind::StackLength);
        let stack_count = by_kind(HistogramKind::StackCount);
        let beta_count = by_kind(HistogramKind::BetaStackCount);
        // Per-structure counts integrate to the per-stack observations.
        assert_eq!(stack_count.observations(), meta.samples);
        assert_eq!(beta_count.observations(), meta.samples);
        assert_eq!(stack_count.weighted_total(), stack_len.observations());
        assert!(beta_count.weighted_total() <= stack_count.weighted_total());
        let loop_len = by_kind(HistogramKind::LoopLength);
        let pk_len = by_kind(HistogramKind::PkLoopLength);
        assert!(pk_len.observations() <= loop_len.observations());
        assert!(loop_len.observations() > 0);

        let mut out = Vec::new();
        loop_len.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("# meta: len=40 genus=1 samples=300 seed=7\n"));
        assert!(text.contains("value,count"));
    }
}
