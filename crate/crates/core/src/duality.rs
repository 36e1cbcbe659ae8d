//! Two-backbone chord diagrams and their correspondence with planted
//! bicellular maps.
//!
//! A diagram places `len1 + len2` positions on two backbones and pairs `2n`
//! of them by arcs.  Collapsing the unpaired positions leaves the *core*:
//! the paired positions in backbone order with their matching, which is
//! exactly a planted bicellular map once each backbone is closed off by a
//! plant.  [`Diagram2B::poincare_dual`] performs that collapse and
//! [`dual_inverse`] undoes it; the [`DualContext`] carries what the map
//! forgets (backbone lengths and where the unpaired positions sit).
//!
//! The counting and sampling routines work with diagrams in *canonical
//! boundary* form: the second backbone starts with a paired position, so
//! unpaired positions between the last paired position of backbone one and
//! the first paired position of backbone two all belong to backbone one.
//! Every family member is produced exactly once that way from the triple
//! (unpaired set, split, matching).

use std::fmt;

use crate::map::PlantedBicellularMap;
use crate::{MapError, ParseError};

/// A two-backbone chord diagram.  Positions are global and one-based: the
/// first backbone is `1..=len1`, the second `len1+1..=len1+len2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram2B {
    len1: usize,
    len2: usize,
    pairs: Vec<(usize, usize)>,
}

/// What a diagram has beyond its core map: the backbone lengths and the
/// global positions of the paired sites, in backbone order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualContext {
    len1: usize,
    len2: usize,
    paired: Vec<usize>,
}

impl DualContext {
    pub fn len1(&self) -> usize {
        self.len1
    }

    pub fn len2(&self) -> usize {
        self.len2
    }

    pub fn total_len(&self) -> usize {
        self.len1 + self.len2
    }

    /// Global position of the `i`-th paired site, `i` in `1..=2n`.
    pub fn position(&self, i: usize) -> usize {
        self.paired[i - 1]
    }

    pub fn paired_positions(&self) -> &[usize] {
        &self.paired
    }
}

impl Diagram2B {
    /// Validates backbone lengths and that `pairs` forms a partial matching
    /// of the positions.
    pub fn new(len1: usize, len2: usize, pairs: Vec<(usize, usize)>) -> Result<Self, MapError> {
        let total = len1 + len2;
        let mut used = vec![false; total + 1];
        for &(p, q) in &pairs {
            for pos in [p, q] {
                if pos == 0 || pos > total {
                    return Err(MapError::ArcOutOfRange {
                        pos,
                        n: pairs.len(),
                    });
                }
            }
            if p == q || used[p] || used[q] {
                return Err(MapError::BadMatching);
            }
            used[p] = true;
            used[q] = true;
        }
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(p, q)| (p.min(q), p.max(q)))
            .collect();
        pairs.sort_unstable();
        Ok(Diagram2B { len1, len2, pairs })
    }

    pub fn len1(&self) -> usize {
        self.len1
    }

    pub fn len2(&self) -> usize {
        self.len2
    }

    pub fn total_len(&self) -> usize {
        self.len1 + self.len2
    }

    pub fn arc_count(&self) -> usize {
        self.pairs.len()
    }

    /// Arcs as global position pairs `(p, q)`, `p < q`, sorted.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// True when the arc joins the two backbones.
    pub fn is_external(&self, pair: (usize, usize)) -> bool {
        pair.0 <= self.len1 && pair.1 > self.len1
    }

    /// Paired positions in increasing order.
    pub fn paired_positions(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.pairs.iter().flat_map(|&(p, q)| [p, q]).collect();
        out.sort_unstable();
        out
    }

    /// Unpaired positions in increasing order.
    pub fn unpaired_positions(&self) -> Vec<usize> {
        let total = self.total_len();
        let mut used = vec![false; total + 1];
        for &(p, q) in &self.pairs {
            used[p] = true;
            used[q] = true;
        }
        (1..=total).filter(|&p| !used[p]).collect()
    }

    /// True when the diagram is in canonical boundary form: the second
    /// backbone is non-empty and starts with a paired position, and each
    /// backbone carries at least one paired position.
    pub fn is_boundary_canonical(&self) -> bool {
        let m = self
            .paired_positions()
            .iter()
            .filter(|&&p| p <= self.len1)
            .count();
        m >= 1
            && m + 1 <= 2 * self.arc_count()
            && self.len2 >= 1
            && self.paired_positions().contains(&(self.len1 + 1))
    }

    /// Collapses unpaired positions and returns the core map together with
    /// the context needed to reinsert them.  Fails when the core is not
    /// connected (the diagram then has no well-defined genus as a single
    /// interaction structure).
    pub fn poincare_dual(&self) -> Result<(PlantedBicellularMap, DualContext), MapError> {
        let paired = self.paired_positions();
        let mut index = vec![0usize; self.total_len() + 1];
        for (i, &p) in paired.iter().enumerate() {
            index[p] = i + 1;
        }
        let m = paired.iter().filter(|&&p| p <= self.len1).count();
        let arcs: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .map(|&(p, q)| (index[p], index[q]))
            .collect();
        let map = PlantedBicellularMap::from_arcs(m, &arcs)?;
        Ok((
            map,
            DualContext {
                len1: self.len1,
                len2: self.len2,
                paired,
            },
        ))
    }

    /// Genus of the core map.
    pub fn genus(&self) -> Result<usize, MapError> {
        Ok(self.poincare_dual()?.0.genus())
    }

    /// Text form `len1 len2 | p-q p-q ...` with global one-based positions.
    pub fn to_text(&self) -> String {
        let arcs = self
            .pairs
            .iter()
            .map(|(p, q)| format!("{p}-{q}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!("{} {} | {}", self.len1, self.len2, arcs)
    }

    /// Parses the form produced by [`Self::to_text`].
    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        let line = text.trim();
        let (head, tail) = line.split_once('|').ok_or(ParseError::Syntax {
            line: 1,
            reason: "expected `len1 len2 | arcs`".into(),
        })?;
        let lens: Vec<usize> = head
            .split_whitespace()
            .map(|tok| {
                tok.parse().map_err(|_| ParseError::Syntax {
                    line: 1,
                    reason: format!("`{tok}` is not a length"),
                })
            })
            .collect::<Result<_, _>>()?;
        if lens.len() != 2 {
            return Err(ParseError::Syntax {
                line: 1,
                reason: "expected exactly two backbone lengths".into(),
            });
        }
        let mut pairs = Vec::new();
        for tok in tail.split_whitespace() {
            let (p, q) = tok.split_once('-').ok_or(ParseError::Syntax {
                line: 1,
                reason: format!("`{tok}` is not an arc `p-q`"),
            })?;
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| ParseError::Syntax {
                    line: 1,
                    reason: format!("`{s}` is not a position"),
                })
            };
            pairs.push((parse(p)?, parse(q)?));
        }
        Ok(Self::new(lens[0], lens[1], pairs)?)
    }
}

impl fmt::Display for Diagram2B {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Rebuilds the diagram from a core map and the context captured by
/// [`Diagram2B::poincare_dual`].
pub fn dual_inverse(
    map: &PlantedBicellularMap,
    ctx: &DualContext,
) -> Result<Diagram2B, MapError> {
    if ctx.paired.len() != 2 * map.arc_count() {
        return Err(MapError::BadMatching);
    }
    let pairs = map
        .arcs()
        .iter()
        .map(|&(i, j)| (ctx.position(i), ctx.position(j)))
        .collect();
    Diagram2B::new(ctx.len1, ctx.len2, pairs)
}

/// Builds the canonical-boundary diagram of total length `total` whose core
/// is `map` and whose unpaired positions are `unpaired` (strictly
/// increasing globals).  The first backbone ends right before the
/// `(m+1)`-th paired position.
pub fn assemble_diagram(
    map: &PlantedBicellularMap,
    unpaired: &[usize],
    total: usize,
) -> Result<Diagram2B, MapError> {
    let n = map.arc_count();
    if total != 2 * n + unpaired.len() {
        return Err(MapError::BadMatching);
    }
    let mut is_unpaired = vec![false; total + 1];
    for &p in unpaired {
        if p == 0 || p > total {
            return Err(MapError::ArcOutOfRange { pos: p, n });
        }
        if is_unpaired[p] {
            return Err(MapError::BadMatching);
        }
        is_unpaired[p] = true;
    }
    let paired: Vec<usize> = (1..=total).filter(|&p| !is_unpaired[p]).collect();
    let m = map.first_boundary_arity();
    if m + 1 > paired.len() {
        return Err(MapError::BadSplit { m, n: paired.len() });
    }
    let len1 = paired[m] - 1;
    let ctx = DualContext {
        len1,
        len2: total - len1,
        paired,
    };
    dual_inverse(map, &ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_of_crossing_diagram() {
        let d = Diagram2B::from_text("3 1 | 1-3 2-4").unwrap();
        let (map, ctx) = d.poincare_dual().unwrap();
        assert_eq!(map.genus(), 0);
        assert_eq!(map.arc_count(), 2);
        assert_eq!(map.first_boundary_arity(), 3);
        assert_eq!(ctx.paired_positions(), &[1, 2, 3, 4]);
        let back = dual_inverse(&map, &ctx).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn unpaired_positions_collapse_and_reinsert() {
        // Same core as above with unpaired padding on both backbones.
        let d = Diagram2B::from_text("5 3 | 2-4 3-6").unwrap();
        let (map, ctx) = d.poincare_dual().unwrap();
        assert_eq!(map.arc_count(), 2);
        assert_eq!(map.first_boundary_arity(), 3);
        assert_eq!(ctx.paired_positions(), &[2, 3, 4, 6]);
        assert_eq!(d.unpaired_positions(), vec![1, 5, 7, 8]);
        let back = dual_inverse(&map, &ctx).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn disconnected_core_is_rejected() {
        let d = Diagram2B::from_text("2 2 | 1-2 3-4").unwrap();
        assert_eq!(d.poincare_dual(), Err(MapError::NotConnected));
    }

    #[test]
    fn assemble_places_between_block_gaps_on_first_backbone() {
        let map = PlantedBicellularMap::from_arcs(1, &[(1, 2)]).unwrap();
        // Total length 4 with unpaired positions 2 and 3: paired are 1 and 4,
        // the second paired position starts backbone two, so len1 = 3.
        let d = assemble_diagram(&map, &[2, 3], 4).unwrap();
        assert_eq!(d.to_text(), "3 1 | 1-4");
        assert!(d.is_boundary_canonical());
    }

    #[test]
    fn external_arcs_cross_the_boundary() {
        let d = Diagram2B::from_text("3 3 | 1-4 2-3 5-6").unwrap();
        assert!(d.is_external((1, 4)));
        assert!(!d.is_external((2, 3)));
        assert!(!d.is_external((5, 6)));
    }

    #[test]
    fn text_parsing_rejects_malformed_input() {
        assert!(Diagram2B::from_text("3 | 1-2").is_err());
        assert!(Diagram2B::from_text("2 2 | 1-1").is_err());
        assert!(Diagram2B::from_text("2 2 | 1-2 2-3").is_err());
        assert!(Diagram2B::from_text("2 2 | 1-5").is_err());
    }

    #[test]
    fn genus_of_interleaved_diagram() {
        // Three mutually crossing external arcs: genus one.
        let d = Diagram2B::from_text("3 3 | 1-4 2-5 3-6").unwrap();
        assert_eq!(d.genus().unwrap(), 1);
    }
}
