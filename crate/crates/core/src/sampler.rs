//! Exact uniform samplers for interaction structures and diagrams.
//!
//! A structure of genus `g` with `n` arcs is sampled by running the surgery
//! backwards: draw the split of arcs between the two cells, draw a uniform
//! plane tree for each cell, then walk the glue moves with each move chosen
//! proportionally to the weighted number of completions computed in
//! [`crate::counting`], with a uniform admissible mark subset.  Every map
//! has exactly one (split, trees, marked glue path) history, and the
//! telescoping of move weights makes each history equally likely, so the
//! output is exactly uniform — no floating point is involved anywhere.
//!
//! The split law `W_m ∝ ε₀(m) ε₀(n−m) F_m` is drawn by exact inversion
//! from cumulative big-integer tables while `n` is moderate.  For large `n`
//! the Catalan factors dwarf everything; there `j = min(m, n − m)` is
//! proposed from the first passage of a fair coin walk (law `∝ ε₀(j) 4^{−j}`,
//! expected `O(√n)` steps), a coin picks the side, and the draw is accepted
//! with an exact-rational probability that restores `W_m` — so the output
//! law is identical while no excursion ever has to be walked to the far end
//! of the path.

use num::bigint::RandBigInt;
use num::rational::BigRational;
use num::{BigInt, BigUint, Integer, One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::counting::{
    binomial, connected_weights, glue_transitions, plane_tree_counts, split_root_weight,
    split_weights, GlueKind, PathState,
};
use crate::duality::{assemble_diagram, Diagram2B};
use crate::map::{PlaneTree, PlantedBicellularMap};
use crate::surgery::{MacroStep, SurgeryState};
use crate::SampleError;

/// Above this arc count the split sampler switches from cumulative
/// big-integer inversion to first-return proposals with exact rejection.
const SPLIT_TABLE_LIMIT: usize = 4096;

/// Draws a uniform plane tree with `edges` edges by the cycle lemma: a
/// shuffled word of `edges + 1` ups and `edges` downs has exactly one
/// rotation that stays positive, and each tree arises from the same number
/// of words.
pub fn sample_plane_tree<R: Rng>(rng: &mut R, edges: usize) -> PlaneTree {
    if edges == 0 {
        return PlaneTree::from_word(Vec::new()).expect("empty word is a tree");
    }
    let len = 2 * edges + 1;
    let mut word = vec![false; len];
    word[..=edges].fill(true);
    word.shuffle(rng);
    let start = positive_rotation(&word);
    debug_assert!(word[start]);
    let dyck: Vec<bool> = (1..len).map(|i| word[(start + i) % len]).collect();
    PlaneTree::from_word(dyck).expect("the positive rotation is a planted word")
}

/// The unique index `k` such that the rotation of `word` starting at `k`
/// has all its partial sums positive.  Requires one more up than down.
fn positive_rotation(word: &[bool]) -> usize {
    let mut sum = 0i64;
    let mut min = i64::MAX;
    let mut arg = 0;
    for (i, &up) in word.iter().enumerate() {
        sum += if up { 1 } else { -1 };
        if sum <= min {
            min = sum;
            arg = i;
        }
    }
    debug_assert_eq!(sum, 1, "cycle lemma needs total weight one");
    (arg + 1) % word.len()
}

/// First passage to zero of a fair `±1` walk started at height one: the
/// passage happens at step `2j + 1` with probability `ε₀(j) / 2^{2j+1}`.
/// Returns `None` when the passage has not happened within `2·cap + 1`
/// steps, i.e. when `j` would exceed `cap`.
fn fair_first_passage<R: Rng>(rng: &mut R, cap: usize) -> Option<usize> {
    let limit = 2 * cap as u64 + 1;
    let mut height: u64 = 1;
    let mut step: u64 = 0;
    let mut buf: u64 = 0;
    let mut left: u32 = 0;
    while height > 0 {
        if step == limit {
            return None;
        }
        if left == 0 {
            buf = rng.gen();
            left = 64;
        }
        height = if buf & 1 == 1 { height + 1 } else { height - 1 };
        buf >>= 1;
        left -= 1;
        step += 1;
    }
    Some(((step - 1) / 2) as usize)
}

/// The correction `ρ(j) / ρ(j_max)` with `ρ(j) = 4^{j+1} ε₀(n−j) / ε₀(n+1)`,
/// as the exact product `∏_{i=j}^{j_max−1} (2(n−i) − 1) / (2(n−i) + 2)`.
fn exact_catalan_tail_ratio(n: usize, j: usize, jmax: usize) -> BigRational {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in j..jmax {
        num *= BigUint::from(2 * (n - i) as u64 - 1);
        den *= BigUint::from(2 * (n - i) as u64 + 2);
    }
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Outward-rounded 63-bit fixed-point bounds on the Catalan tail ratios
/// `ρ(j) / ρ(j_max)` for `j = 0..=j_max`.  The true ratio lies within one
/// part in `~2^{63} / j_max` of both bounds, so an exact Bernoulli test can
/// almost always be settled against the bounds alone.
fn ratio_sandwich(n: usize, jmax: usize) -> (Vec<u64>, Vec<u64>) {
    let mut lo = vec![0u64; jmax + 1];
    let mut hi = vec![0u64; jmax + 1];
    lo[jmax] = 1 << 63;
    hi[jmax] = 1 << 63;
    for j in (0..jmax).rev() {
        let num = (2 * (n - j) - 1) as u128;
        let den = (2 * (n - j) + 2) as u128;
        lo[j] = ((lo[j + 1] as u128 * num) / den) as u64;
        hi[j] = ((hi[j + 1] as u128 * num + den - 1) / den) as u64;
    }
    (lo, hi)
}

/// The fixed-point bound `mant / 2^63` as an exact rational.
fn dyadic63(mant: u64) -> BigRational {
    BigRational::new(BigInt::from(mant), BigInt::one() << 63)
}

/// A uniform variate on `[0, 1)` refined one random bit at a time, so the
/// same draw can be compared exactly against several thresholds.
struct LazyUniform {
    bits: BigUint,
    len: u64,
}

impl LazyUniform {
    fn new() -> Self {
        LazyUniform {
            bits: BigUint::zero(),
            len: 0,
        }
    }

    /// Exact test of `U < x`; refines `U` until the comparison resolves.
    fn less_than<R: Rng>(&mut self, rng: &mut R, x: &BigRational) -> bool {
        if x.is_negative() || x.is_zero() {
            return false;
        }
        if *x >= BigRational::one() {
            return true;
        }
        let num = x.numer().to_biguint().expect("x > 0");
        let den = x.denom().to_biguint().expect("denominators are positive");
        loop {
            // U lies in [bits, bits + 1) / 2^len.
            let scaled = &num << self.len;
            if (&self.bits + 1u32) * &den <= scaled {
                return true;
            }
            if &self.bits * &den >= scaled {
                return false;
            }
            self.bits = (&self.bits << 1) | BigUint::from(rng.gen_range(0u8..2) as u32);
            self.len += 1;
        }
    }
}

/// Exact categorical draw over non-negative big-integer weights.
fn pick_weighted_uint<R: Rng>(rng: &mut R, weights: &[BigUint]) -> usize {
    let total: BigUint = weights.iter().sum();
    assert!(!total.is_zero(), "categorical draw needs positive mass");
    let mut u = rng.gen_biguint_below(&total);
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    unreachable!("u < total")
}

/// Exact categorical draw over non-negative rational weights.
fn pick_weighted<R: Rng>(rng: &mut R, weights: &[BigRational]) -> usize {
    let mut lcm = BigInt::one();
    for w in weights {
        lcm = lcm.lcm(w.denom());
    }
    let scaled: Vec<BigUint> = weights
        .iter()
        .map(|w| {
            (w.numer() * &lcm / w.denom())
                .to_biguint()
                .expect("weights are non-negative")
        })
        .collect();
    pick_weighted_uint(rng, &scaled)
}

/// Uniform `k`-subset of `pool` by a partial Fisher–Yates pass.
fn choose_subset<R: Rng>(rng: &mut R, pool: &[usize], k: usize) -> Vec<usize> {
    debug_assert!(k <= pool.len());
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    for i in 0..k {
        let j = rng.gen_range(i..idx.len());
        idx.swap(i, j);
    }
    idx[..k].iter().map(|&i| pool[i]).collect()
}

#[derive(Debug)]
enum SplitMode {
    /// Cumulative `W_m · D` over `m = 0..=n` for a common denominator `D`.
    Table {
        cumulative: Vec<BigUint>,
        total: BigUint,
    },
    /// Mirror-folded fair-walk proposals: a fair coin walk proposes
    /// `j = min(m, n−m)` with probability `∝ ε₀(j) 4^{−j}`, a coin picks the
    /// side, and the draw is accepted with probability
    /// `[ρ(j)/ρ(j_max)]·[F_m/F_max]`, where `ρ(j) = 4^{j+1} ε₀(n−j)/ε₀(n+1)`
    /// restores the exact split law.  `ratio_lo/hi` sandwich `ρ(j)/ρ(j_max)`
    /// in 63-bit fixed point so the test almost never has to build the
    /// exact Catalan-tail product.
    Rejection {
        f_max: BigRational,
        ratio_lo: Vec<u64>,
        ratio_hi: Vec<u64>,
    },
}

/// Builds the rejection-mode tables from one sweep over the split weights;
/// `None` when every split weight vanishes (empty family).
fn rejection_mode(n: usize, genus: usize, connected: &[BigRational]) -> Option<SplitMode> {
    let f_max = (0..=n)
        .map(|m| split_root_weight(n, m, genus, connected))
        .max()
        .expect("n + 1 splits");
    if f_max.is_zero() {
        return None;
    }
    let (ratio_lo, ratio_hi) = ratio_sandwich(n, n / 2);
    Some(SplitMode::Rejection {
        f_max,
        ratio_lo,
        ratio_hi,
    })
}

/// Exactly uniform sampler over planted bicellular maps of fixed genus and
/// arc count.
#[derive(Debug)]
pub struct StructureSampler {
    genus: usize,
    n: usize,
    connected: Vec<BigRational>,
    mode: SplitMode,
    family_size: Option<BigUint>,
}

impl StructureSampler {
    /// Builds the split tables.  Fails when the family is empty.
    pub fn new(genus: usize, n: usize) -> Result<Self, SampleError> {
        let connected = connected_weights(n, genus);
        let empty = || SampleError::EmptyFamily { genus, n };
        if n <= SPLIT_TABLE_LIMIT {
            let catalans = plane_tree_counts(n);
            let roots: Vec<BigRational> = (0..=n)
                .map(|m| {
                    let trees = BigInt::from(&catalans[m] * &catalans[n - m]);
                    split_root_weight(n, m, genus, &connected) * BigRational::from(trees)
                })
                .collect();
            let mut lcm = BigInt::one();
            for w in &roots {
                lcm = lcm.lcm(w.denom());
            }
            let mut cumulative = Vec::with_capacity(n + 1);
            let mut acc = BigUint::zero();
            for w in &roots {
                acc += (w.numer() * &lcm / w.denom())
                    .to_biguint()
                    .expect("path weights are non-negative");
                cumulative.push(acc.clone());
            }
            let total = acc;
            if total.is_zero() {
                return Err(empty());
            }
            // Σ W_m is the family size; the scaled total must divide back.
            let (size, rem) = BigInt::from(total.clone()).div_rem(&lcm);
            assert!(rem.is_zero(), "split weights must sum to an integer");
            Ok(StructureSampler {
                genus,
                n,
                connected,
                mode: SplitMode::Table { cumulative, total },
                family_size: Some(size.to_biguint().expect("family sizes are non-negative")),
            })
        } else {
            let mode = rejection_mode(n, genus, &connected).ok_or_else(empty)?;
            Ok(StructureSampler {
                genus,
                n,
                connected,
                mode,
                family_size: None,
            })
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn arc_count(&self) -> usize {
        self.n
    }

    /// Number of structures in the family; not materialised in rejection
    /// mode, where the Catalan factors are astronomically large.
    pub fn family_size(&self) -> Option<&BigUint> {
        self.family_size.as_ref()
    }

    /// Draws one structure, exactly uniformly over the family.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> PlantedBicellularMap {
        let split = self.sample_split(rng);
        self.sample_with_split(rng, split)
    }

    fn sample_split<R: Rng>(&self, rng: &mut R) -> usize {
        match &self.mode {
            SplitMode::Table { cumulative, total } => {
                let u = rng.gen_biguint_below(total);
                cumulative.partition_point(|c| *c <= u)
            }
            SplitMode::Rejection {
                f_max,
                ratio_lo,
                ratio_hi,
            } => loop {
                if let Some(m) = self.split_trial(rng, f_max, ratio_lo, ratio_hi) {
                    return m;
                }
            },
        }
    }

    /// One rejection trial.  The accepted law is exactly
    /// `W_m ∝ ε₀(m) ε₀(n−m) F_m`: the fair-walk proposal draws
    /// `j = min(m, n−m)` with probability `∝ ε₀(j) 4^{−j}`, so accepting
    /// with `[ρ(j)/ρ(j_max)]·[F_m/F_max]` (halved at a double-covered
    /// midpoint) leaves `W_m` on the nose.  One lazily-refined uniform
    /// settles the whole test, first against the cheap fixed-point bounds.
    fn split_trial<R: Rng>(
        &self,
        rng: &mut R,
        f_max: &BigRational,
        ratio_lo: &[u64],
        ratio_hi: &[u64],
    ) -> Option<usize> {
        let jmax = self.n / 2;
        let j = fair_first_passage(rng, jmax)?;
        let m = if rng.gen::<bool>() { j } else { self.n - j };
        let mut u = LazyUniform::new();
        // Screen against the ratio bound alone before paying for `F_m`.
        let hi = dyadic63(ratio_hi[j]);
        if !u.less_than(rng, &hi) {
            return None;
        }
        let mut f_part = split_root_weight(self.n, m, self.genus, &self.connected) / f_max;
        if self.n % 2 == 0 && j == jmax {
            // Both mirror sides land on m = n/2, doubling its proposal mass.
            f_part /= BigRational::from(BigInt::from(2));
        }
        if u.less_than(rng, &(&f_part * dyadic63(ratio_lo[j]))) {
            return Some(m);
        }
        if !u.less_than(rng, &(&f_part * hi)) {
            return None;
        }
        // The uniform fell inside the sandwich gap (width ~2^{-45}); settle
        // the Bernoulli against the exact tail ratio.
        let exact = exact_catalan_tail_ratio(self.n, j, jmax) * f_part;
        u.less_than(rng, &exact).then_some(m)
    }

    /// Glues a uniform structure conditioned on the split.  Exposed to the
    /// tests, which use a frozen split as a deliberately biased sampler.
    pub(crate) fn sample_with_split<R: Rng>(
        &self,
        rng: &mut R,
        split: usize,
    ) -> PlantedBicellularMap {
        let tree_first = sample_plane_tree(rng, split);
        let tree_second = sample_plane_tree(rng, self.n - split);
        let mut state = SurgeryState::from_tree_pair(&tree_first, &tree_second);
        let suffix = split_weights(self.n, split, self.genus, &self.connected);
        let mut stage = PathState::Pair { total: 0, first: 0 };
        while stage != (PathState::Connected { total: self.genus }) {
            let transitions = glue_transitions(stage, self.n, split, self.genus);
            let weights: Vec<BigRational> = transitions
                .iter()
                .map(|tr| {
                    let target = &suffix[&tr.target];
                    BigRational::new(
                        BigInt::from(tr.subsets.clone()),
                        BigInt::from(tr.multiplicity),
                    ) * target
                })
                .collect();
            let tr = &transitions[pick_weighted(rng, &weights)];
            let marks = self.choose_marks(rng, &state, tr.kind, tr.delta, &tr.subsets);
            let step = MacroStep {
                kind: tr.kind,
                delta: tr.delta,
                marks,
            };
            state
                .macro_glue(&step, 0)
                .expect("sampled marks are admissible");
            #[cfg(debug_assertions)]
            {
                let (t1, t2) = state.trisections_by_cell();
                let entries = match tr.kind {
                    GlueKind::RaiseFirst => t1.len(),
                    GlueKind::RaiseSecond => t2.len(),
                    GlueKind::Connect | GlueKind::RaiseConnected => t1.len() + t2.len(),
                };
                debug_assert_eq!(
                    entries, tr.multiplicity,
                    "glue multiplicity must count the inverse entry points"
                );
            }
            stage = tr.target;
        }
        state
            .into_bicellular()
            .expect("the glue walk ends on a connected bicellular map")
    }

    fn choose_marks<R: Rng>(
        &self,
        rng: &mut R,
        state: &SurgeryState,
        kind: GlueKind,
        delta: usize,
        subsets: &BigUint,
    ) -> Vec<usize> {
        let (pool_first, pool_second) = state.markable_vertices();
        match kind {
            GlueKind::RaiseFirst | GlueKind::RaiseConnected => {
                debug_assert_eq!(binomial(pool_first.len(), 2 * delta + 1), *subsets);
                choose_subset(rng, &pool_first, 2 * delta + 1)
            }
            GlueKind::RaiseSecond => {
                debug_assert_eq!(binomial(pool_second.len(), 2 * delta + 1), *subsets);
                choose_subset(rng, &pool_second, 2 * delta + 1)
            }
            GlueKind::Connect => {
                let need = 2 * delta + 3;
                let lo = 1.max(need.saturating_sub(pool_second.len()));
                let hi = (need - 1).min(pool_first.len());
                debug_assert!(lo <= hi, "a connecting move always has a valid spread");
                let weights: Vec<BigUint> = (lo..=hi)
                    .map(|k| binomial(pool_first.len(), k) * binomial(pool_second.len(), need - k))
                    .collect();
                debug_assert_eq!(weights.iter().sum::<BigUint>(), *subsets);
                let k = lo + pick_weighted_uint(rng, &weights);
                let mut marks = choose_subset(rng, &pool_first, k);
                marks.extend(choose_subset(rng, &pool_second, need - k));
                marks
            }
        }
    }
}

/// Exactly uniform sampler over canonical-boundary diagrams of fixed total
/// length and genus, mixing over the arc count.
#[derive(Debug)]
pub struct DiagramSampler {
    total_len: usize,
    by_arcs: Vec<(usize, StructureSampler)>,
    weights: Vec<BigUint>,
    family_size: BigUint,
}

impl DiagramSampler {
    pub fn new(genus: usize, total_len: usize) -> Result<Self, SampleError> {
        let mut by_arcs = Vec::new();
        let mut weights = Vec::new();
        let mut family_size = BigUint::zero();
        for n in 1..=total_len / 2 {
            let Ok(arcs) = StructureSampler::new(genus, n) else {
                continue;
            };
            let count = arcs
                .family_size()
                .expect("diagram lengths stay in table range")
                .clone();
            let weight = binomial(total_len, total_len - 2 * n) * count;
            if weight.is_zero() {
                continue;
            }
            family_size += &weight;
            weights.push(weight);
            by_arcs.push((n, arcs));
        }
        if family_size.is_zero() {
            return Err(SampleError::EmptyDiagramFamily {
                len: total_len,
                genus,
            });
        }
        Ok(DiagramSampler {
            total_len,
            by_arcs,
            weights,
            family_size,
        })
    }

    /// Number of diagrams in the family.
    pub fn family_size(&self) -> &BigUint {
        &self.family_size
    }

    pub fn total_len(&self) -> usize {
        self.total_len
    }

    /// Draws one diagram, exactly uniformly over the family.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Diagram2B {
        let idx = pick_weighted_uint(rng, &self.weights);
        let (n, arcs) = &self.by_arcs[idx];
        let map = arcs.sample(rng);
        let positions: Vec<usize> = (1..=self.total_len).collect();
        let mut unpaired = choose_subset(rng, &positions, self.total_len - 2 * n);
        unpaired.sort_unstable();
        assemble_diagram(&map, &unpaired, self.total_len)
            .expect("assembling a sampled core cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::ToPrimitive;
    use crate::counting::{bicellular_count, diagram_counts, unicellular_count};
    use crate::oracle::{bucket_samples, chi_square_against, chi_square_uniform};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn positive_rotation_is_exhaustive_cycle_lemma() {
        // Over all words with m+1 ups and m downs, every planted tree must
        // arise from exactly 2m+1 words.
        for m in 1..=4 {
            let len = 2 * m + 1;
            let mut per_tree = std::collections::BTreeMap::new();
            for mask in 0u32..(1 << len) {
                if mask.count_ones() as usize != m + 1 {
                    continue;
                }
                let word: Vec<bool> = (0..len).map(|i| mask & (1 << i) != 0).collect();
                let start = positive_rotation(&word);
                let dyck: Vec<bool> = (1..len).map(|i| word[(start + i) % len]).collect();
                let tree = PlaneTree::from_word(dyck).expect("rotation must be planted");
                *per_tree.entry(tree.word_string()).or_insert(0usize) += 1;
            }
            assert_eq!(
                per_tree.len(),
                unicellular_count(0, m).unwrap().to_usize().unwrap()
            );
            assert!(per_tree.values().all(|&c| c == len));
        }
    }

    #[test]
    fn lazy_uniform_refines_consistently() {
        // Testing U < 2/3 and then U < 1/3 on the same variate partitions
        // [0, 1) into three equal cells; the joint outcome must follow that
        // law, and the answers must never be contradictory.
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
        let mut rng = rng(11);
        let mut cells = [0u64; 3];
        for _ in 0..6000 {
            let mut u = LazyUniform::new();
            let below_two_thirds = u.less_than(&mut rng, &two_thirds);
            let below_third = u.less_than(&mut rng, &third);
            assert!(below_two_thirds || !below_third);
            cells[if below_third {
                0
            } else if below_two_thirds {
                1
            } else {
                2
            }] += 1;
        }
        let report = chi_square_uniform(&cells);
        assert!(report.passes(), "statistic {}", report.statistic);
    }

    #[test]
    fn plane_tree_sampler_is_uniform() {
        let mut rng = rng(7);
        let counts = bucket_samples(
            (0..6000).map(|_| sample_plane_tree(&mut rng, 4).word_string()),
        );
        assert_eq!(counts.len(), 14);
        let cells: Vec<u64> = counts.values().copied().collect();
        let report = chi_square_uniform(&cells);
        assert!(report.passes(), "statistic {}", report.statistic);
    }

    #[test]
    fn fair_walk_passage_matches_the_catalan_law() {
        // Conditioned on not hitting the cap, P(j) ∝ ε₀(j) / 4^j.
        let cap = 6;
        let catalans = plane_tree_counts(cap);
        let weights: Vec<f64> = (0..=cap)
            .map(|j| catalans[j].to_f64().unwrap() / 4f64.powi(j as i32))
            .collect();
        let mut rng = rng(11);
        let mut counts = vec![0u64; cap + 1];
        let mut kept = 0;
        while kept < 20000 {
            if let Some(j) = fair_first_passage(&mut rng, cap) {
                counts[j] += 1;
                kept += 1;
            }
        }
        let report = chi_square_against(&counts, &weights);
        assert!(report.passes(), "statistic {}", report.statistic);
    }

    #[test]
    fn ratio_sandwich_brackets_the_exact_tail_ratio() {
        let n = 9001;
        let jmax = n / 2;
        let (lo, hi) = ratio_sandwich(n, jmax);
        for j in [0, 1, jmax / 3, jmax - 1, jmax] {
            let exact = exact_catalan_tail_ratio(n, j, jmax);
            assert!(dyadic63(lo[j]) <= exact && exact <= dyadic63(hi[j]));
            assert!(hi[j] - lo[j] <= 4 * jmax as u64, "gap stays within drift");
        }
        // The smallest ratio tends to 4^{-3/2} ≈ 0.3536 from above.
        assert!(lo[0] > (1u64 << 63) / 3, "ratios stay well above zero");
    }

    #[test]
    fn structure_sampler_is_uniform_on_small_families() {
        // (genus, n, samples): supports of 21 and 48 structures.
        for (genus, n, samples) in [(1usize, 3usize, 4200usize), (0, 3, 9600)] {
            let sampler = StructureSampler::new(genus, n).unwrap();
            let expected = bicellular_count(genus, n).unwrap();
            assert_eq!(sampler.family_size(), Some(&expected));
            let mut rng = rng(13 + genus as u64);
            let counts = bucket_samples((0..samples).map(|_| {
                let map = sampler.sample(&mut rng);
                assert_eq!(map.genus(), genus);
                assert_eq!(map.arc_count(), n);
                map.to_text()
            }));
            assert_eq!(
                counts.len(),
                expected.to_usize().unwrap(),
                "every structure must be reachable"
            );
            let cells: Vec<u64> = counts.values().copied().collect();
            let report = chi_square_uniform(&cells);
            assert!(
                report.passes(),
                "genus {genus}, n {n}: statistic {} above {}",
                report.statistic,
                report.critical_99
            );
        }
    }

    #[test]
    fn frozen_split_is_detectably_biased() {
        // Negative control: conditioning on one split must fail the same
        // uniformity test that the real sampler passes.
        let sampler = StructureSampler::new(1, 3).unwrap();
        let mut rng = rng(17);
        let counts = bucket_samples(
            (0..4200).map(|_| sampler.sample_with_split(&mut rng, 0).to_text()),
        );
        let mut cells: Vec<u64> = counts.values().copied().collect();
        cells.resize(21, 0);
        let report = chi_square_uniform(&cells);
        assert!(
            !report.passes(),
            "a frozen split must not look uniform: statistic {}",
            report.statistic
        );
    }

    #[test]
    fn rejection_mode_agrees_with_table_mode() {
        // Force the large-n path on small families and compare.  n = 4
        // exercises the double-covered midpoint, n = 5 the disjoint halves.
        for (genus, n, samples, seed) in [(1usize, 4usize, 8800usize, 23u64), (0, 5, 25600, 29)] {
            let table = StructureSampler::new(genus, n).unwrap();
            let mut rejection = StructureSampler::new(genus, n).unwrap();
            rejection.mode = rejection_mode(n, genus, &rejection.connected).unwrap();
            let expected = bicellular_count(genus, n).unwrap().to_usize().unwrap();
            for (offset, sampler) in [(0u64, &table), (4, &rejection)] {
                let mut rng = rng(seed + offset);
                let counts =
                    bucket_samples((0..samples).map(|_| sampler.sample(&mut rng).to_text()));
                assert_eq!(counts.len(), expected);
                let cells: Vec<u64> = counts.values().copied().collect();
                let report = chi_square_uniform(&cells);
                assert!(report.passes(), "statistic {}", report.statistic);
            }
        }
    }

    #[test]
    fn empty_families_are_reported() {
        assert_eq!(
            StructureSampler::new(1, 2).unwrap_err(),
            SampleError::EmptyFamily { genus: 1, n: 2 }
        );
        assert_eq!(
            StructureSampler::new(2, 4).unwrap_err(),
            SampleError::EmptyFamily { genus: 2, n: 4 }
        );
        assert_eq!(
            DiagramSampler::new(3, 5).unwrap_err(),
            SampleError::EmptyDiagramFamily { len: 5, genus: 3 }
        );
    }

    #[test]
    fn diagram_sampler_is_uniform() {
        // Genus zero, length five; the family size is kept honest against
        // the counting route.
        let sampler = DiagramSampler::new(0, 5).unwrap();
        let expected = diagram_counts(0, 5)
            .unwrap()
            .into_iter()
            .fold(BigUint::zero(), |acc, (_, c)| acc + c);
        assert_eq!(*sampler.family_size(), expected);
        let support = expected.to_usize().unwrap();
        let mut rng = rng(29);
        let counts = bucket_samples((0..10 * support + 2000).map(|_| {
            let d = sampler.sample(&mut rng);
            assert_eq!(d.total_len(), 5);
            assert!(d.is_boundary_canonical());
            assert_eq!(d.genus().unwrap(), 0);
            d.to_text()
        }));
        assert_eq!(counts.len(), support);
        let cells: Vec<u64> = counts.values().copied().collect();
        let report = chi_square_uniform(&cells);
        assert!(report.passes(), "statistic {}", report.statistic);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let sampler = StructureSampler::new(1, 5).unwrap();
        let a: Vec<String> = {
            let mut rng = rng(31);
            (0..5).map(|_| sampler.sample(&mut rng).to_text()).collect()
        };
        let b: Vec<String> = {
            let mut rng = rng(31);
            (0..5).map(|_| sampler.sample(&mut rng).to_text()).collect()
        };
        assert_eq!(a, b);
    }
}
