//! Trisection surgery: slicing planted bicellular maps into pairs of plane
//! trees, and the exact inverse gluing.
//!
//! One *micro* move is a three-point rotation of `σ`.  Slicing rotates the
//! images at a triple `(a₁, a₂, a₃)` backwards, splitting the vertex that
//! carries the anchor `a₃ = σ(τ)` of a trisection `τ` into three vertices
//! whose minima (in boundary order) are `a₁`, `a₂` and possibly `a₃`;
//! gluing rotates forwards, merging three vertices into one and producing
//! a trisection.  A *macro* step chains micros at a fixed anchor until the
//! anchor's vertex carries its own minimum.  Each macro step either lowers
//! the genus of one cell or cuts the map at its plants into two planted
//! one-faced cells; the vertices split off along the way are the *marks*.
//!
//! [`decompose`] macro-slices to the bottom — always at the smallest
//! trisection, reducing the first cell before the second once the map has
//! been cut — and records the marks of every step.  [`rebuild`] replays the
//! record backwards and is a literal inverse; the tests round-trip every
//! small map exhaustively.  The same moves drive the uniform sampler, and
//! counting the admissible mark subsets per move is exactly what
//! [`crate::counting`] turns into arc-family counts.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;

use crate::counting::GlueKind;
use crate::map::{PlaneTree, PlantedBicellularMap, PlantedUnicellularMap};
use crate::perm::Perm;
use crate::{MapError, ParseError, SurgeryError};

/// One macro move, recorded from the gluing side: the move kind, the genus
/// it adds, and the marked vertices given by their minimum half-edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroStep {
    pub kind: GlueKind,
    pub delta: usize,
    pub marks: Vec<usize>,
}

impl MacroStep {
    fn expected_marks(&self) -> usize {
        match self.kind {
            GlueKind::Connect => 2 * self.delta + 3,
            _ => 2 * self.delta + 1,
        }
    }
}

/// The full record of a decomposition: two plane trees plus the glue steps
/// (in gluing order) that rebuild the map, and the trisection the first
/// slice entered through.  Marks and the origin live in the labelling of
/// the tree pair: first cell `0..2·split+2`, second cell the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTrace {
    pub arc_count: usize,
    pub genus: usize,
    pub split: usize,
    pub tree_first: PlaneTree,
    pub tree_second: PlaneTree,
    pub steps: Vec<MacroStep>,
    pub origin_trisection: usize,
}

/// A mutable `(α, σ)` pair mid-surgery.  `α` never changes; `σ` is edited
/// in place by the micro rotations.  Labels are whatever they were when the
/// state was created — all order comparisons go through [`Layout`], which
/// re-derives the boundary order from the plants.
#[derive(Debug, Clone)]
pub struct SurgeryState {
    alpha: Vec<usize>,
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    plant1: (usize, usize),
    plant2: (usize, usize),
}

/// Boundary order and derived structure of a [`SurgeryState`], recomputed
/// after every micro move.
#[derive(Debug, Clone)]
struct Layout {
    /// `rank[hedge]` = position in the boundary order, first face first.
    rank: Vec<usize>,
    /// `order[position]` = hedge; inverse of `rank`.
    order: Vec<usize>,
    /// Number of half-edges on the first face.
    first_face_len: usize,
    /// Minimum-rank half-edge of each hedge's `σ`-cycle.
    vmin: Vec<usize>,
    /// Whether the state is cut into two components, one per plant.
    split: bool,
    /// `second[hedge]`: the hedge lies in the second component.  All false
    /// while the state is connected.
    second: Vec<bool>,
    /// Genus of the first component; total genus while connected.
    genus1: usize,
    /// Genus of the second component; zero while connected.
    genus2: usize,
}

impl Layout {
    fn is_trisection(&self, sigma: &[usize], x: usize) -> bool {
        let y = sigma[x];
        self.rank[y] <= self.rank[x] && y != self.vmin[y]
    }
}

impl SurgeryState {
    /// Starts from a planted bicellular map.  The map's canonical labels
    /// are kept, so ranks initially equal labels.
    pub fn from_map(map: &PlantedBicellularMap) -> Self {
        let sigma = map.sigma().image().to_vec();
        let sigma_inv = map.sigma().inverse().image().to_vec();
        SurgeryState {
            alpha: map.alpha().image().to_vec(),
            sigma,
            sigma_inv,
            plant1: map.plants().0,
            plant2: map.plants().1,
        }
    }

    /// Starts from a pair of plane trees in pair-canonical labels: the
    /// first cell on `0..2a+2` with plant `{0, 2a+1}`, the second on the
    /// remaining labels with plant `{2a+2, 2n+3}`.
    pub fn from_tree_pair(first: &PlaneTree, second: &PlaneTree) -> Self {
        let (ma, mb) = (first.edge_count(), second.edge_count());
        let h = 2 * (ma + mb) + 4;
        let off = 2 * ma + 2;
        let mut alpha = vec![usize::MAX; h];
        alpha[0] = off - 1;
        alpha[off - 1] = 0;
        alpha[off] = h - 1;
        alpha[h - 1] = off;
        for (p, q) in first.matching() {
            alpha[p] = q;
            alpha[q] = p;
        }
        for (p, q) in second.matching() {
            alpha[off + p] = off + q;
            alpha[off + q] = off + p;
        }
        debug_assert!(alpha.iter().all(|&x| x < h));
        // σ = α ∘ γ with the two canonical boundary cycles.
        let mut sigma = vec![0; h];
        let mut sigma_inv = vec![0; h];
        for x in 0..h {
            let gx = if x == off - 1 {
                0
            } else if x == h - 1 {
                off
            } else {
                x + 1
            };
            sigma[x] = alpha[gx];
            sigma_inv[alpha[gx]] = x;
        }
        SurgeryState {
            alpha,
            sigma,
            sigma_inv,
            plant1: (0, off - 1),
            plant2: (off, h - 1),
        }
    }

    fn half_edges(&self) -> usize {
        self.alpha.len()
    }

    fn set_sigma(&mut self, x: usize, y: usize) {
        self.sigma[x] = y;
        self.sigma_inv[y] = x;
    }

    /// Backward rotation: `σ̂(a₁) = σ(a₃)`, `σ̂(a₂) = σ(a₁)`,
    /// `σ̂(a₃) = σ(a₂)`.  Splits the common vertex of the triple.
    fn rotate_slice(&mut self, a1: usize, a2: usize, a3: usize) {
        let (s1, s2, s3) = (self.sigma[a1], self.sigma[a2], self.sigma[a3]);
        self.set_sigma(a1, s3);
        self.set_sigma(a2, s1);
        self.set_sigma(a3, s2);
    }

    /// Forward rotation, inverse of [`Self::rotate_slice`]: merges the
    /// three vertices of the triple into one.
    fn rotate_glue(&mut self, a1: usize, a2: usize, a3: usize) {
        let (s1, s2, s3) = (self.sigma[a1], self.sigma[a2], self.sigma[a3]);
        self.set_sigma(a1, s2);
        self.set_sigma(a2, s3);
        self.set_sigma(a3, s1);
    }

    /// Recomputes the boundary order and everything hanging off it.
    fn layout(&self) -> Layout {
        let h = self.half_edges();
        let mut order = Vec::with_capacity(h);
        let mut rank = vec![usize::MAX; h];
        let mut first_face_len = 0;
        for (idx, &(out, tip)) in [&self.plant1, &self.plant2].into_iter().enumerate() {
            let mut x = out;
            loop {
                assert_eq!(rank[x], usize::MAX, "plant faces must not overlap");
                rank[x] = order.len();
                order.push(x);
                // γ = α ∘ σ.
                x = self.alpha[self.sigma[x]];
                if x == out {
                    break;
                }
            }
            if idx == 0 {
                first_face_len = order.len();
                assert_eq!(order[first_face_len - 1], tip, "face must end at its plant tip");
            } else {
                assert_eq!(order[order.len() - 1], tip, "face must end at its plant tip");
            }
        }
        assert_eq!(order.len(), h, "the two plant faces must cover every half-edge");

        // Connectivity under α and σ, flooded from the first plant.
        let mut second = vec![true; h];
        let mut stack = vec![self.plant1.0];
        second[self.plant1.0] = false;
        while let Some(x) = stack.pop() {
            for y in [self.alpha[x], self.sigma[x]] {
                if second[y] {
                    second[y] = false;
                    stack.push(y);
                }
            }
        }
        let split = second[self.plant2.0];
        if split {
            // The cut happens exactly along the two faces.
            for p in 0..h {
                assert_eq!(
                    second[order[p]],
                    p >= first_face_len,
                    "a split state separates into its two faces"
                );
            }
        } else {
            second.iter_mut().for_each(|s| *s = false);
        }

        // Sweeping positions in increasing rank lands on each σ-cycle at
        // its minimum first.
        let mut vmin = vec![usize::MAX; h];
        let (mut v1, mut v2) = (0i64, 0i64);
        for p in 0..h {
            let x = order[p];
            if vmin[x] != usize::MAX {
                continue;
            }
            if second[x] {
                v2 += 1;
            } else {
                v1 += 1;
            }
            let mut y = x;
            loop {
                vmin[y] = x;
                y = self.sigma[y];
                if y == x {
                    break;
                }
            }
        }

        let (genus1, genus2) = if split {
            let e1 = (first_face_len / 2) as i64;
            let e2 = ((h - first_face_len) / 2) as i64;
            (euler_genus(v1, e1, 1), euler_genus(v2, e2, 1))
        } else {
            (euler_genus(v1 + v2, (h / 2) as i64, 2), 0)
        };

        Layout {
            rank,
            order,
            first_face_len,
            vmin,
            split,
            second,
            genus1,
            genus2,
        }
    }

    /// Whether the state is currently cut into its two cells.
    pub fn is_split(&self) -> bool {
        self.layout().split
    }

    /// `(genus of first cell, genus of second cell)`; the second is zero
    /// while the state is connected.
    pub fn genera(&self) -> (usize, usize) {
        let layout = self.layout();
        (layout.genus1, layout.genus2)
    }

    /// Trisections in boundary order.
    pub fn trisections(&self) -> Vec<usize> {
        let (mut first, mut second) = self.trisections_by_cell();
        first.append(&mut second);
        first
    }

    /// Trisections split into `(first cell, second cell)`, each in boundary
    /// order.  The second list is empty while the state is connected.
    pub fn trisections_by_cell(&self) -> (Vec<usize>, Vec<usize>) {
        let layout = self.layout();
        let mut first = Vec::new();
        let mut second = Vec::new();
        for &x in &layout.order {
            if !layout.is_trisection(&self.sigma, x) {
                continue;
            }
            if layout.second[x] {
                second.push(x);
            } else {
                first.push(x);
            }
        }
        (first, second)
    }

    /// Markable vertices — every vertex minimum except the two plant tips —
    /// split into `(first cell, second cell)`, each in boundary order.  The
    /// second list is empty while the state is connected.
    pub fn markable_vertices(&self) -> (Vec<usize>, Vec<usize>) {
        let layout = self.layout();
        let mut first = Vec::new();
        let mut second = Vec::new();
        for &x in &layout.order {
            if layout.vmin[x] != x || x == self.plant1.1 || x == self.plant2.1 {
                continue;
            }
            if layout.second[x] {
                second.push(x);
            } else {
                first.push(x);
            }
        }
        (first, second)
    }

    /// Runs one macro slice entering at the trisection `tau`.  Returns the
    /// step that [`Self::macro_glue`] undoes; its marks are half-edges of
    /// this state.
    pub fn macro_slice(&mut self, tau: usize) -> Result<MacroStep, SurgeryError> {
        let before = self.layout();
        if tau >= self.half_edges() || !before.is_trisection(&self.sigma, tau) {
            return Err(SurgeryError::NotATrisection { hedge: tau });
        }
        // The anchor stays σ̂(τᵢ) for the whole cascade.
        let a3 = self.sigma[tau];
        let mut marks = Vec::new();
        let mut layout = before.clone();
        loop {
            assert!(marks.len() < self.half_edges(), "cascade must terminate");
            let a1 = layout.vmin[a3];
            // a2: the smallest element of the anchor's vertex that sits
            // above the anchor, scanning σ-wise from the minimum.
            let mut a2 = usize::MAX;
            let mut x = a1;
            while x != a3 {
                if layout.rank[x] > layout.rank[a3]
                    && (a2 == usize::MAX || layout.rank[x] < layout.rank[a2])
                {
                    a2 = x;
                }
                x = self.sigma[x];
            }
            assert_ne!(a2, usize::MAX, "a trisection vertex has an element above the anchor");
            self.rotate_slice(a1, a2, a3);
            layout = self.layout();
            // The first two freshly split vertices keep a₁ and a₂ as
            // their minima, in that order.
            assert_eq!(layout.vmin[a1], a1, "first split vertex must keep its minimum");
            assert_eq!(layout.vmin[a2], a2, "second split vertex must keep its minimum");
            assert!(layout.rank[a1] < layout.rank[a2]);
            marks.push(a1);
            marks.push(a2);
            if layout.vmin[a3] == a3 {
                // Clean split: the anchor's vertex now carries its own
                // minimum and becomes the last mark.
                marks.push(a3);
                break;
            }
            // Otherwise σ̂⁻¹(a₃) is again a trisection with the same
            // anchor and the cascade continues.
            assert!(
                layout.is_trisection(&self.sigma, self.sigma_inv[a3]),
                "unfinished cascade must re-enter at a trisection"
            );
        }
        // Marks come out sorted by the final boundary order, anchor last;
        // the glue side leans on this to regroup its micros.
        for w in marks.windows(2) {
            assert!(layout.rank[w[0]] < layout.rank[w[1]], "marks must ascend");
        }
        for &mk in &marks {
            assert_eq!(layout.vmin[mk], mk, "marks are vertex minima");
        }

        let (kind, delta) = match (before.split, layout.split) {
            (false, false) => (GlueKind::RaiseConnected, before.genus1 - layout.genus1),
            (false, true) => (
                GlueKind::Connect,
                before.genus1 - layout.genus1 - layout.genus2,
            ),
            (true, true) => {
                if before.second[tau] {
                    assert_eq!(before.genus1, layout.genus1);
                    (GlueKind::RaiseSecond, before.genus2 - layout.genus2)
                } else {
                    assert_eq!(before.genus2, layout.genus2);
                    (GlueKind::RaiseFirst, before.genus1 - layout.genus1)
                }
            }
            (true, false) => unreachable!("slicing never reconnects the cells"),
        };
        let step = MacroStep { kind, delta, marks };
        assert_eq!(step.marks.len(), step.expected_marks());
        Ok(step)
    }

    /// Applies one macro glue: merges the step's marked vertices into one
    /// and returns the trisection the inverse slice would enter through.
    /// `step_index` only labels errors.
    pub fn macro_glue(&mut self, step: &MacroStep, step_index: usize) -> Result<usize, SurgeryError> {
        let before = self.layout();
        // Stage checks; these also pin the one legal ordering of macro
        // kinds, mirroring the slicing direction.
        match step.kind {
            GlueKind::RaiseFirst | GlueKind::RaiseSecond | GlueKind::Connect => {
                if !before.split {
                    return Err(SurgeryError::IllegalSignature {
                        reason: format!(
                            "step {step_index}: pair-stage move on a connected state"
                        ),
                    });
                }
            }
            GlueKind::RaiseConnected => {
                if before.split {
                    return Err(SurgeryError::IllegalSignature {
                        reason: format!("step {step_index}: connected-stage move on a cut state"),
                    });
                }
            }
        }
        if step.kind == GlueKind::RaiseSecond && before.genus1 != 0 {
            return Err(SurgeryError::IllegalSignature {
                reason: format!(
                    "step {step_index}: second-cell raise after the first cell gained genus"
                ),
            });
        }
        if step.delta == 0 && step.kind != GlueKind::Connect {
            return Err(SurgeryError::IllegalSignature {
                reason: format!("step {step_index}: a raise must increase genus"),
            });
        }
        if step.marks.len() != step.expected_marks() {
            return Err(SurgeryError::IllegalSignature {
                reason: format!(
                    "step {step_index}: {} marks cannot carry a genus step of {}",
                    step.marks.len(),
                    step.delta
                ),
            });
        }

        // Mark checks: distinct vertex minima, no plant tips, right cells.
        let mut seen = BTreeSet::new();
        let (mut in_first, mut in_second) = (0usize, 0usize);
        for &mk in &step.marks {
            if mk >= self.half_edges() || !seen.insert(mk) {
                return Err(SurgeryError::CorruptTrace {
                    reason: format!("step {step_index}: marks are not distinct half-edges"),
                });
            }
            if before.vmin[mk] != mk || mk == self.plant1.1 || mk == self.plant2.1 {
                return Err(SurgeryError::MarkPlacementMismatch { step: step_index });
            }
            if before.second[mk] {
                in_second += 1;
            } else {
                in_first += 1;
            }
        }
        let cells_ok = match step.kind {
            GlueKind::RaiseFirst => in_second == 0,
            GlueKind::RaiseSecond => in_first == 0,
            GlueKind::Connect => in_first >= 1 && in_second >= 1,
            GlueKind::RaiseConnected => true,
        };
        if !cells_ok {
            return Err(SurgeryError::BadMarkDistribution {
                found: in_first.max(in_second),
            });
        }

        // Merge from the top: the three largest minima first, then pairs,
        // always feeding into the same anchor vertex.
        let mut sorted = step.marks.clone();
        sorted.sort_by_key(|&mk| Reverse(before.rank[mk]));
        let anchor = sorted[0];
        self.rotate_glue(sorted[2], sorted[1], sorted[0]);
        let mut idx = 3;
        while idx < sorted.len() {
            let (hi, lo) = (sorted[idx], sorted[idx + 1]);
            let layout = self.layout();
            let (a1, a2) = if layout.rank[lo] < layout.rank[hi] {
                (lo, hi)
            } else {
                (hi, lo)
            };
            self.rotate_glue(a1, a2, anchor);
            idx += 2;
        }

        // The merged vertex must expose the promised trisection and the
        // stage must move exactly as declared.
        let after = self.layout();
        let tau = self.sigma_inv[anchor];
        if !after.is_trisection(&self.sigma, tau) || self.sigma[tau] != anchor {
            return Err(SurgeryError::MarkPlacementMismatch { step: step_index });
        }
        let stage_ok = match step.kind {
            GlueKind::RaiseFirst => {
                after.split
                    && after.genus1 == before.genus1 + step.delta
                    && after.genus2 == before.genus2
            }
            GlueKind::RaiseSecond => {
                after.split
                    && after.genus2 == before.genus2 + step.delta
                    && after.genus1 == before.genus1
            }
            GlueKind::Connect => {
                !after.split && after.genus1 == before.genus1 + before.genus2 + step.delta
            }
            GlueKind::RaiseConnected => {
                !after.split && after.genus1 == before.genus1 + step.delta
            }
        };
        if !stage_ok {
            return Err(SurgeryError::CorruptTrace {
                reason: format!("step {step_index}: glue did not produce the declared stage"),
            });
        }
        Ok(tau)
    }

    /// The canonical label the hedge would get after
    /// [`Self::into_bicellular`].
    pub fn canonical_label_of(&self, hedge: usize) -> usize {
        self.layout().rank[hedge]
    }

    /// Read-only view of the current vertex permutation, as an image
    /// vector in the state's labels.
    pub fn sigma_image(&self) -> &[usize] {
        &self.sigma
    }

    /// Canonicalises a connected state back into a planted bicellular map.
    pub fn into_bicellular(self) -> Result<PlantedBicellularMap, MapError> {
        let layout = self.layout();
        if layout.split {
            return Err(MapError::NotConnected);
        }
        let h = self.half_edges();
        let mut image = vec![0; h];
        for x in 0..h {
            image[layout.rank[x]] = layout.rank[self.alpha[x]];
        }
        let m = layout.first_face_len - 2;
        PlantedBicellularMap::from_canonical_alpha(m, Perm::from_image(image)?)
    }
}

fn euler_genus(v: i64, e: i64, f: i64) -> usize {
    let chi = v - e + f;
    let doubled = 2 - chi;
    assert!(
        doubled >= 0 && doubled % 2 == 0,
        "Euler characteristic must give a whole genus"
    );
    (doubled / 2) as usize
}

/// Slices `map` all the way down to a pair of plane trees, recording every
/// macro step.  While connected the smallest trisection is cut; once the
/// map is in two cells the first cell is flattened before the second.  The
/// returned steps are in gluing order, relabelled to the tree pair.
pub fn decompose(map: &PlantedBicellularMap) -> DecompositionTrace {
    decompose_from(map, None).expect("the canonical first cut always exists")
}

/// Like [`decompose`], but the first cut is made at the `index`-th
/// trisection of `map` in boundary order rather than the first one; the
/// remaining cuts stay canonical.  Fails when `index` is out of range.
pub fn decompose_at(
    map: &PlantedBicellularMap,
    index: usize,
) -> Result<DecompositionTrace, SurgeryError> {
    decompose_from(map, Some(index))
}

fn decompose_from(
    map: &PlantedBicellularMap,
    first_cut: Option<usize>,
) -> Result<DecompositionTrace, SurgeryError> {
    let mut state = SurgeryState::from_map(map);
    let mut sliced = Vec::new();
    let mut origin = None;
    loop {
        let layout = state.layout();
        let want_second = if !layout.split {
            None
        } else if layout.genus1 > 0 {
            Some(false)
        } else if layout.genus2 > 0 {
            Some(true)
        } else {
            break;
        };
        let tau = match first_cut.filter(|_| origin.is_none()) {
            Some(index) => {
                let all: Vec<usize> = layout
                    .order
                    .iter()
                    .copied()
                    .filter(|&x| layout.is_trisection(&state.sigma, x))
                    .collect();
                *all.get(index).ok_or(SurgeryError::TrisectionIndex {
                    index,
                    count: all.len(),
                })?
            }
            None => layout
                .order
                .iter()
                .copied()
                .filter(|&x| want_second.is_none_or(|s| layout.second[x] == s))
                .find(|&x| layout.is_trisection(&state.sigma, x))
                .expect("positive genus keeps a trisection available"),
        };
        origin.get_or_insert(tau);
        let step = state
            .macro_slice(tau)
            .expect("the chosen hedge is a trisection");
        sliced.push(step);
    }

    let layout = state.layout();
    assert!(layout.split && layout.genus1 == 0 && layout.genus2 == 0);
    let relabel = &layout.rank;
    let split = layout.first_face_len / 2 - 1;

    // In pair labels each cell is a canonically labelled planted tree;
    // read the Dyck words straight off α.
    let h = state.half_edges();
    let off = layout.first_face_len;
    let mut alpha_first = vec![0; off];
    let mut alpha_second = vec![0; h - off];
    for x in 0..h {
        let (nx, na) = (relabel[x], relabel[state.alpha[x]]);
        if nx < off {
            assert!(na < off, "α cannot cross a cut");
            alpha_first[nx] = na;
        } else {
            alpha_second[nx - off] = na - off;
        }
    }
    let tree_of = |image: Vec<usize>| {
        let cell = PlantedUnicellularMap::from_canonical_alpha(
            Perm::from_image(image).expect("relabelled α is a permutation"),
        )
        .expect("a flattened cell is a planted tree");
        PlaneTree::from_unicellular(&cell).expect("a flattened cell has genus zero")
    };

    let steps = sliced
        .iter()
        .rev()
        .map(|step| {
            let mut marks: Vec<usize> = step.marks.iter().map(|&mk| relabel[mk]).collect();
            marks.sort_unstable();
            MacroStep {
                kind: step.kind,
                delta: step.delta,
                marks,
            }
        })
        .collect();

    Ok(DecompositionTrace {
        arc_count: map.arc_count(),
        genus: map.genus(),
        split,
        tree_first: tree_of(alpha_first),
        tree_second: tree_of(alpha_second),
        steps,
        origin_trisection: relabel[origin.expect("every map takes at least the cutting step")],
    })
}

/// Replays a trace from its tree pair back to the glued map.  Returns the
/// map and the trisection the decomposition entered through, in the map's
/// canonical labels.  Every structural claim of the trace is checked.
pub fn rebuild(trace: &DecompositionTrace) -> Result<(PlantedBicellularMap, usize), SurgeryError> {
    if trace.tree_first.edge_count() != trace.split
        || trace.tree_first.edge_count() + trace.tree_second.edge_count() != trace.arc_count
    {
        return Err(SurgeryError::IllegalSignature {
            reason: "tree sizes disagree with the declared split".into(),
        });
    }
    let mut state = SurgeryState::from_tree_pair(&trace.tree_first, &trace.tree_second);
    let mut tau = None;
    for (idx, step) in trace.steps.iter().enumerate() {
        tau = Some(state.macro_glue(step, idx)?);
    }
    let Some(tau) = tau else {
        return Err(SurgeryError::IllegalSignature {
            reason: "trace carries no glue steps".into(),
        });
    };
    let (genus1, genus2) = state.genera();
    if state.is_split() {
        return Err(SurgeryError::IllegalSignature {
            reason: "trace never joins the two cells".into(),
        });
    }
    if genus1 != trace.genus || genus2 != 0 {
        return Err(SurgeryError::CorruptTrace {
            reason: format!("glue reaches genus {genus1}, trace declares {}", trace.genus),
        });
    }
    if tau != trace.origin_trisection {
        return Err(SurgeryError::CorruptTrace {
            reason: format!(
                "glue ends at trisection {tau}, trace declares {}",
                trace.origin_trisection
            ),
        });
    }
    let tau_canonical = state.canonical_label_of(tau);
    let map = state.into_bicellular().map_err(|e| SurgeryError::CorruptTrace {
        reason: format!("glued state is not a planted bicellular map: {e}"),
    })?;
    Ok((map, tau_canonical))
}

fn kind_name(kind: GlueKind) -> &'static str {
    match kind {
        GlueKind::RaiseFirst => "raise-first",
        GlueKind::RaiseSecond => "raise-second",
        GlueKind::Connect => "connect",
        GlueKind::RaiseConnected => "raise-connected",
    }
}

fn kind_from_name(name: &str) -> Option<GlueKind> {
    Some(match name {
        "raise-first" => GlueKind::RaiseFirst,
        "raise-second" => GlueKind::RaiseSecond,
        "connect" => GlueKind::Connect,
        "raise-connected" => GlueKind::RaiseConnected,
        _ => return None,
    })
}

impl DecompositionTrace {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "arcs: {}\ngenus: {}\nsplit: {}\nfirst: {}\nsecond: {}\norigin: {}\n",
            self.arc_count,
            self.genus,
            self.split,
            self.tree_first.word_string(),
            self.tree_second.word_string(),
            self.origin_trisection,
        );
        for step in &self.steps {
            out.push_str(&format!(
                "glue: {} {} |{}\n",
                kind_name(step.kind),
                step.delta,
                step.marks
                    .iter()
                    .map(|m| format!(" {m}"))
                    .collect::<String>()
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        let mut arcs = None;
        let mut genus = None;
        let mut split = None;
        let mut first = None;
        let mut second = None;
        let mut origin = None;
        let mut steps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |reason: String| ParseError::Syntax {
                line: idx + 1,
                reason,
            };
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| syntax("expected `key: value`".into()))?;
            let rest = rest.trim();
            let number = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| syntax(format!("`{s}` is not a non-negative integer")))
            };
            match key.trim() {
                "arcs" => arcs = Some(number(rest)?),
                "genus" => genus = Some(number(rest)?),
                "split" => split = Some(number(rest)?),
                "first" => first = Some(PlaneTree::from_str_word(rest)?),
                "second" => second = Some(PlaneTree::from_str_word(rest)?),
                "origin" => origin = Some(number(rest)?),
                "glue" => {
                    let (head, marks) = rest
                        .split_once('|')
                        .ok_or_else(|| syntax("glue line needs `kind delta | marks`".into()))?;
                    let mut head = head.split_whitespace();
                    let kind = head
                        .next()
                        .and_then(kind_from_name)
                        .ok_or_else(|| syntax("unknown glue kind".into()))?;
                    let delta = number(
                        head.next()
                            .ok_or_else(|| syntax("glue line is missing its genus step".into()))?,
                    )?;
                    if head.next().is_some() {
                        return Err(syntax("trailing tokens before `|`".into()));
                    }
                    let marks = marks
                        .split_whitespace()
                        .map(number)
                        .collect::<Result<Vec<_>, _>>()?;
                    steps.push(MacroStep { kind, delta, marks });
                }
                other => return Err(syntax(format!("unknown key `{other}`"))),
            }
        }
        Ok(DecompositionTrace {
            arc_count: arcs.ok_or(ParseError::MissingSection("arcs"))?,
            genus: genus.ok_or(ParseError::MissingSection("genus"))?,
            split: split.ok_or(ParseError::MissingSection("split"))?,
            tree_first: first.ok_or(ParseError::MissingSection("first"))?,
            tree_second: second.ok_or(ParseError::MissingSection("second"))?,
            steps,
            origin_trisection: origin.ok_or(ParseError::MissingSection("origin"))?,
        })
    }
}

impl fmt::Display for DecompositionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
