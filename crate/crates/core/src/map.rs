//! Fat maps encoded by permutation pairs, and the planted families the rest
//! of the crate works with.
//!
//! A fat map on half-edges `{0, .., h-1}` is a pair `(α, σ)` where `α` is a
//! fixed-point-free involution matching half-edges into edges and `σ` rotates
//! the half-edges counter-clockwise around each vertex.  The boundary
//! permutation is `γ = α ∘ σ`; its cycles are the faces.  Genus comes from
//! Euler's relation `|σ| − e + |γ| = 2 − 2g` on a connected map.
//!
//! Two planted families matter here:
//!
//! * [`PlantedBicellularMap`] — connected, exactly two faces, one plant
//!   (a pendant root edge whose tip is a fixed point of `σ`) in each face.
//!   This is the core of a two-backbone interaction structure: the two faces
//!   are the backbones, the `n` non-plant edges are the arcs.
//! * [`PlantedUnicellularMap`] — connected, one face, one plant.  Genus-zero
//!   instances are plane trees; these are the leaves of the surgery.
//!
//! Both families carry a canonical labelling: half-edges are numbered along
//! the boundary, first face first, starting at the plant's outgoing half.
//! With that labelling the boundary permutation is just `i ↦ i+1` with a
//! wrap per face, and rank comparisons reduce to integer comparisons.

use std::fmt;

use crate::perm::Perm;
use crate::{MapError, ParseError};

/// Classification of a half-edge against the boundary order.
///
/// Reading the boundary, a half-edge `x` is an up-step when `σ(x)` lies
/// strictly ahead of `x` and a down-step otherwise.  A down-step whose image
/// `σ(x)` is not the smallest half-edge on its vertex is a *trisection*; the
/// surgery in [`crate::surgery`] is driven entirely by these.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepClass {
    Up,
    Down,
    Trisection,
}

/// A connected fat map given by `(α, σ)`, with no planted structure assumed.
///
/// This is the raw representation: the brute-force enumerators build these
/// wholesale, and the planted types validate through it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FatMap {
    alpha: Perm,
    sigma: Perm,
}

impl FatMap {
    /// Validates that `alpha` is a fixed-point-free involution of the same
    /// degree as `sigma`.
    pub fn build(alpha: Perm, sigma: Perm) -> Result<Self, MapError> {
        if alpha.len() != sigma.len() {
            return Err(MapError::SizeMismatch {
                a: alpha.len(),
                b: sigma.len(),
            });
        }
        if alpha.len() % 2 != 0 {
            return Err(MapError::OddHalfEdges { h: alpha.len() });
        }
        if let Some(x) = (0..alpha.len()).find(|&x| {
            let y = alpha.apply(x);
            y == x || alpha.apply(y) != x
        }) {
            return Err(MapError::AlphaNotInvolution { hedge: x });
        }
        Ok(FatMap { alpha, sigma })
    }

    pub fn half_edges(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &Perm {
        &self.alpha
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    /// Boundary permutation `γ = α ∘ σ`.
    pub fn gamma(&self) -> Perm {
        self.alpha.compose_after(&self.sigma)
    }

    /// Faces, i.e. cycles of `γ`.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        self.gamma().cycles()
    }

    /// Vertices, i.e. cycles of `σ`.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        self.sigma.cycles()
    }

    /// Connected-component id per half-edge, in the group generated by
    /// `α` and `σ`.
    pub fn components(&self) -> Vec<usize> {
        let h = self.half_edges();
        let mut comp = vec![usize::MAX; h];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..h {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(x) = stack.pop() {
                for y in [self.alpha.apply(x), self.sigma.apply(x)] {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.half_edges() == 0 || self.components().iter().all(|&c| c == 0)
    }

    /// Genus of a connected map via Euler's relation.
    pub fn genus(&self) -> Result<usize, MapError> {
        if !self.is_connected() {
            return Err(MapError::NotConnected);
        }
        let v = self.sigma.cycle_count();
        let e = self.half_edges() / 2;
        let f = self.gamma().cycle_count();
        let chi = v as i64 - e as i64 + f as i64;
        debug_assert!(chi <= 2 && (2 - chi) % 2 == 0);
        Ok(((2 - chi) / 2) as usize)
    }
}

/// Smallest half-edge of each `σ`-cycle, indexed by half-edge.
///
/// On canonically labelled maps the label order *is* the boundary order, so
/// these minima are exactly the vertex minima used by the trisection test.
fn vertex_minima(sigma: &Perm) -> Vec<usize> {
    let h = sigma.len();
    let mut vmin = vec![usize::MAX; h];
    for cycle in sigma.cycles() {
        let min = *cycle.iter().min().expect("cycles are nonempty");
        for &x in &cycle {
            vmin[x] = min;
        }
    }
    vmin
}

fn classify_with_identity_rank(sigma: &Perm) -> Vec<StepClass> {
    let vmin = vertex_minima(sigma);
    (0..sigma.len())
        .map(|x| {
            let y = sigma.apply(x);
            if y > x {
                StepClass::Up
            } else if y == vmin[x] {
                StepClass::Down
            } else {
                StepClass::Trisection
            }
        })
        .collect()
}

/// A planted bicellular map in canonical labels.
///
/// Half-edges are `0..2n+4` where `n` is the number of arcs.  The first
/// boundary is `(0, 1, .., m+1)` and the second `(m+2, .., 2n+3)`, where `m`
/// counts the arc half-edges on the first boundary.  The plants are the
/// edges `{0, m+1}` and `{m+2, 2n+3}`; their tips `m+1` and `2n+3` are fixed
/// points of `σ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlantedBicellularMap {
    n: usize,
    m: usize,
    genus: usize,
    alpha: Perm,
    sigma: Perm,
}

impl PlantedBicellularMap {
    /// Builds the map with `m` arc half-edges on the first boundary and the
    /// given arcs, each arc a pair of distinct positions in `1..=2n`.
    /// Position `p` is the `p`-th arc half-edge along the two boundaries.
    pub fn from_arcs(m: usize, arcs: &[(usize, usize)]) -> Result<Self, MapError> {
        let n = arcs.len();
        if m > 2 * n {
            return Err(MapError::BadSplit { m, n: 2 * n });
        }
        let h = 2 * n + 4;
        let mut image = vec![usize::MAX; h];
        image[0] = m + 1;
        image[m + 1] = 0;
        image[m + 2] = 2 * n + 3;
        image[2 * n + 3] = m + 2;
        let hedge_of = |p: usize| if p <= m { p } else { p + 2 };
        for &(p, q) in arcs {
            for pos in [p, q] {
                if pos == 0 || pos > 2 * n {
                    return Err(MapError::ArcOutOfRange { pos, n });
                }
            }
            let (a, b) = (hedge_of(p), hedge_of(q));
            if a == b || image[a] != usize::MAX || image[b] != usize::MAX {
                return Err(MapError::BadMatching);
            }
            image[a] = b;
            image[b] = a;
        }
        if image.iter().any(|&x| x == usize::MAX) {
            return Err(MapError::BadMatching);
        }
        let alpha = Perm::from_image(image)?;
        Self::from_canonical_alpha(m, alpha)
    }

    /// Builds from a canonical `α` (plants included), deriving `σ = α ∘ γ`
    /// from the canonical boundary permutation.
    pub(crate) fn from_canonical_alpha(m: usize, alpha: Perm) -> Result<Self, MapError> {
        let h = alpha.len();
        debug_assert!(h >= 4 && h % 2 == 0);
        let n = (h - 4) / 2;
        if alpha.apply(0) != m + 1 {
            return Err(MapError::BadPlant {
                hedge: 0,
                reason: "first plant must match 0 with m+1",
            });
        }
        if alpha.apply(m + 2) != h - 1 {
            return Err(MapError::BadPlant {
                hedge: m + 2,
                reason: "second plant must match m+2 with the last half-edge",
            });
        }
        let gamma = canonical_bicellular_boundary(n, m);
        let sigma = alpha.compose_after(&gamma);
        let map = FatMap::build(alpha, sigma)?;
        if !map.is_connected() {
            return Err(MapError::NotConnected);
        }
        let v = map.sigma().cycle_count();
        // v = n + 2 − 2g on a connected bicellular map.
        if v > n + 2 || (n + 2 - v) % 2 != 0 {
            return Err(MapError::WrongFaceCount {
                expected: 2,
                found: map.gamma().cycle_count(),
            });
        }
        let genus = (n + 2 - v) / 2;
        let FatMap { alpha, sigma } = map;
        Ok(PlantedBicellularMap {
            n,
            m,
            genus,
            alpha,
            sigma,
        })
    }

    /// Accepts an arbitrary labelling together with the two plants (given as
    /// `(outgoing, tip)` per face) and canonicalises.
    pub fn from_alpha_sigma(
        alpha: Perm,
        sigma: Perm,
        plant1: (usize, usize),
        plant2: (usize, usize),
    ) -> Result<Self, MapError> {
        let map = FatMap::build(alpha, sigma)?;
        if !map.is_connected() {
            return Err(MapError::NotConnected);
        }
        let faces = map.faces();
        if faces.len() != 2 {
            return Err(MapError::WrongFaceCount {
                expected: 2,
                found: faces.len(),
            });
        }
        for (out, tip) in [plant1, plant2] {
            if map.alpha().apply(out) != tip {
                return Err(MapError::BadPlant {
                    hedge: out,
                    reason: "plant halves are not matched by alpha",
                });
            }
            if map.sigma().apply(tip) != tip {
                return Err(MapError::BadPlant {
                    hedge: tip,
                    reason: "plant tip is not a fixed point of sigma",
                });
            }
        }
        let gamma = map.gamma();
        let tour1 = boundary_tour(&gamma, plant1.0);
        let tour2 = boundary_tour(&gamma, plant2.0);
        if tour1.len() + tour2.len() != map.half_edges()
            || tour1.contains(&plant2.0)
            || *tour1.last().expect("tour is nonempty") != plant1.1
            || *tour2.last().expect("tour is nonempty") != plant2.1
        {
            return Err(MapError::BadPlant {
                hedge: plant1.0,
                reason: "plants do not sit on distinct faces",
            });
        }
        let m = tour1.len() - 2;
        let mut relabel = vec![usize::MAX; map.half_edges()];
        for (new, &old) in tour1.iter().chain(tour2.iter()).enumerate() {
            relabel[old] = new;
        }
        let mut image = vec![usize::MAX; map.half_edges()];
        for old in 0..map.half_edges() {
            image[relabel[old]] = relabel[map.alpha().apply(old)];
        }
        let alpha = Perm::from_image(image)?;
        Self::from_canonical_alpha(m, alpha)
    }

    /// Number of arcs.
    pub fn arc_count(&self) -> usize {
        self.n
    }

    /// Number of arc half-edges on the first boundary.
    pub fn first_boundary_arity(&self) -> usize {
        self.m
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn half_edges(&self) -> usize {
        2 * self.n + 4
    }

    pub fn alpha(&self) -> &Perm {
        &self.alpha
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    pub fn gamma(&self) -> Perm {
        self.alpha.compose_after(&self.sigma)
    }

    /// Plant half-edges, as `((out, tip), (out, tip))`.
    pub fn plants(&self) -> ((usize, usize), (usize, usize)) {
        ((0, self.m + 1), (self.m + 2, 2 * self.n + 3))
    }

    /// The arcs as position pairs `(p, q)`, `p < q`, positions in `1..=2n`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let pos_of = |h: usize| if h <= self.m { h } else { h - 2 };
        let mut out = Vec::with_capacity(self.n);
        for h in (1..=self.m).chain(self.m + 3..=2 * self.n + 2) {
            let im = self.alpha.apply(h);
            if h < im {
                out.push((pos_of(h), pos_of(im)));
            }
        }
        out
    }

    /// Per-half-edge step classification against the boundary order.
    pub fn classify_steps(&self) -> Vec<StepClass> {
        classify_with_identity_rank(&self.sigma)
    }

    /// Half-edges that are trisections, in boundary order.  A connected
    /// bicellular map of genus `g` has exactly `2g + 2` of them.
    pub fn trisections(&self) -> Vec<usize> {
        self.classify_steps()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == StepClass::Trisection)
            .map(|(x, _)| x)
            .collect()
    }

    /// Vertices as cycles of `σ`.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        self.sigma.cycles()
    }

    /// Serialises to the three-line text form.
    pub fn to_text(&self) -> String {
        let ((p1o, p1t), (p2o, p2t)) = self.plants();
        format!(
            "alpha: {}\nsigma: {}\nplants: {} {} {} {}\n",
            join(self.alpha.image()),
            join(self.sigma.image()),
            p1o,
            p1t,
            p2o,
            p2t
        )
    }

    /// Parses the three-line text form produced by [`Self::to_text`]; any
    /// labelling is accepted and canonicalised.
    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        let mut alpha = None;
        let mut sigma = None;
        let mut plants = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(':').ok_or(ParseError::Syntax {
                line: idx + 1,
                reason: "expected `key: values`".into(),
            })?;
            let values = parse_usizes(rest, idx + 1)?;
            match key.trim() {
                "alpha" => alpha = Some(values),
                "sigma" => sigma = Some(values),
                "plants" => plants = Some(values),
                other => {
                    return Err(ParseError::Syntax {
                        line: idx + 1,
                        reason: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let alpha = alpha.ok_or(ParseError::MissingSection("alpha"))?;
        let sigma = sigma.ok_or(ParseError::MissingSection("sigma"))?;
        let plants = plants.ok_or(ParseError::MissingSection("plants"))?;
        if plants.len() != 4 {
            return Err(ParseError::Invalid(
                "plants line must list four half-edges".into(),
            ));
        }
        let alpha = Perm::from_image(alpha)?;
        let sigma = Perm::from_image(sigma)?;
        Ok(Self::from_alpha_sigma(
            alpha,
            sigma,
            (plants[0], plants[1]),
            (plants[2], plants[3]),
        )?)
    }
}

impl fmt::Display for PlantedBicellularMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Canonical bicellular boundary `(0 .. m+1)(m+2 .. 2n+3)`.
pub(crate) fn canonical_bicellular_boundary(n: usize, m: usize) -> Perm {
    let h = 2 * n + 4;
    let mut image: Vec<usize> = (0..h).map(|x| x + 1).collect();
    image[m + 1] = 0;
    image[h - 1] = m + 2;
    Perm::from_image(image).expect("canonical boundary is a permutation")
}

/// Canonical unicellular boundary `(0 .. 2m+1)`.
pub(crate) fn canonical_unicellular_boundary(m: usize) -> Perm {
    let h = 2 * m + 2;
    let image: Vec<usize> = (0..h).map(|x| (x + 1) % h).collect();
    Perm::from_image(image).expect("canonical boundary is a permutation")
}

fn boundary_tour(gamma: &Perm, start: usize) -> Vec<usize> {
    let mut tour = vec![start];
    let mut x = gamma.apply(start);
    while x != start {
        tour.push(x);
        x = gamma.apply(x);
    }
    tour
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_usizes(s: &str, line: usize) -> Result<Vec<usize>, ParseError> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| ParseError::Syntax {
                line,
                reason: format!("`{tok}` is not a non-negative integer"),
            })
        })
        .collect()
}

/// A planted one-faced map in canonical labels: half-edges `0..2m+2`, the
/// boundary is the full cycle `(0, 1, .., 2m+1)` and the plant is the edge
/// `{0, 2m+1}` with tip `2m+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlantedUnicellularMap {
    m: usize,
    genus: usize,
    alpha: Perm,
    sigma: Perm,
}

impl PlantedUnicellularMap {
    /// Builds from a canonical `α` (plant `{0, 2m+1}` included).
    pub fn from_canonical_alpha(alpha: Perm) -> Result<Self, MapError> {
        let h = alpha.len();
        if h < 2 || h % 2 != 0 {
            return Err(MapError::OddHalfEdges { h });
        }
        let m = (h - 2) / 2;
        if alpha.apply(0) != h - 1 {
            return Err(MapError::BadPlant {
                hedge: 0,
                reason: "plant must match 0 with the last half-edge",
            });
        }
        let gamma = canonical_unicellular_boundary(m);
        let sigma = alpha.compose_after(&gamma);
        let map = FatMap::build(alpha, sigma)?;
        if !map.is_connected() {
            return Err(MapError::NotConnected);
        }
        let v = map.sigma().cycle_count();
        // v = m + 2 − 2g on a connected unicellular map.
        if v > m + 2 || (m + 2 - v) % 2 != 0 {
            return Err(MapError::WrongFaceCount {
                expected: 1,
                found: map.gamma().cycle_count(),
            });
        }
        let genus = (m + 2 - v) / 2;
        let FatMap { alpha, sigma } = map;
        Ok(PlantedUnicellularMap {
            m,
            genus,
            alpha,
            sigma,
        })
    }

    /// Builds from arcs on positions `1..=2m` (the plant is added).
    pub fn from_arcs(arcs: &[(usize, usize)]) -> Result<Self, MapError> {
        let m = arcs.len();
        let h = 2 * m + 2;
        let mut image = vec![usize::MAX; h];
        image[0] = h - 1;
        image[h - 1] = 0;
        for &(p, q) in arcs {
            for pos in [p, q] {
                if pos == 0 || pos > 2 * m {
                    return Err(MapError::ArcOutOfRange { pos, n: m });
                }
            }
            if p == q || image[p] != usize::MAX || image[q] != usize::MAX {
                return Err(MapError::BadMatching);
            }
            image[p] = q;
            image[q] = p;
        }
        let alpha = Perm::from_image(image)?;
        Self::from_canonical_alpha(alpha)
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn half_edges(&self) -> usize {
        2 * self.m + 2
    }

    pub fn alpha(&self) -> &Perm {
        &self.alpha
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    /// Plant as `(out, tip)`.
    pub fn plant(&self) -> (usize, usize) {
        (0, 2 * self.m + 1)
    }

    pub fn classify_steps(&self) -> Vec<StepClass> {
        classify_with_identity_rank(&self.sigma)
    }

    /// A connected unicellular map of genus `g` has exactly `2g` trisections.
    pub fn trisections(&self) -> Vec<usize> {
        self.classify_steps()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == StepClass::Trisection)
            .map(|(x, _)| x)
            .collect()
    }
}

/// A plane tree as a Dyck word; the genus-zero case of
/// [`PlantedUnicellularMap`] with the plant stripped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    word: Vec<bool>,
}

impl PlaneTree {
    /// Builds from a Dyck word, `true` = up.
    pub fn from_word(word: Vec<bool>) -> Result<Self, ParseError> {
        let mut height = 0i64;
        for &up in &word {
            height += if up { 1 } else { -1 };
            if height < 0 {
                return Err(ParseError::Invalid("word dips below zero".into()));
            }
        }
        if height != 0 {
            return Err(ParseError::Invalid("word does not return to zero".into()));
        }
        Ok(PlaneTree { word })
    }

    pub fn from_str_word(s: &str) -> Result<Self, ParseError> {
        let word = s
            .trim()
            .chars()
            .map(|c| match c {
                'U' | 'u' => Ok(true),
                'D' | 'd' => Ok(false),
                other => Err(ParseError::Invalid(format!(
                    "unexpected character `{other}` in Dyck word"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_word(word)
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.word.len() / 2
    }

    pub fn word(&self) -> &[bool] {
        &self.word
    }

    pub fn word_string(&self) -> String {
        self.word
            .iter()
            .map(|&up| if up { 'U' } else { 'D' })
            .collect()
    }

    /// The matching on positions `1..=2m` pairing each up-step with the
    /// down-step that closes it.
    pub fn matching(&self) -> Vec<(usize, usize)> {
        let mut stack = Vec::new();
        let mut arcs = Vec::with_capacity(self.edge_count());
        for (i, &up) in self.word.iter().enumerate() {
            if up {
                stack.push(i + 1);
            } else {
                let open = stack.pop().expect("validated Dyck word");
                arcs.push((open, i + 1));
            }
        }
        arcs
    }

    /// The planted genus-zero unicellular map with this shape.
    pub fn to_unicellular(&self) -> PlantedUnicellularMap {
        let tree = PlantedUnicellularMap::from_arcs(&self.matching())
            .expect("a Dyck matching is a valid planted tree");
        debug_assert_eq!(tree.genus(), 0);
        tree
    }

    /// Recovers the Dyck word of a genus-zero unicellular map.
    pub fn from_unicellular(map: &PlantedUnicellularMap) -> Result<Self, MapError> {
        if map.genus() != 0 {
            return Err(MapError::WrongFaceCount {
                expected: 1,
                found: 1 + 2 * map.genus(),
            });
        }
        let m = map.edge_count();
        let word = (1..=2 * m).map(|x| map.alpha().apply(x) > x).collect();
        Ok(PlaneTree { word })
    }
}
