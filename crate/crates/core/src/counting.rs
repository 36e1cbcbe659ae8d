//! Exact counting of planted maps and diagrams.
//!
//! Two independent routes count bicellular maps of genus `g` with `n` arcs:
//!
//! * [`BicellularTable`] — a genus recursion that expresses
//!   `2(g+1) · B_g(n)` through lower-genus bicellular counts and pairs of
//!   unicellular counts, the latter from their own genus recursion
//!   ([`UnicellularTable`]) grounded in Catalan numbers.
//! * [`bicellular_count_paths`] — a transfer-matrix walk over the glue
//!   states of the surgery: starting from two plane trees, every maximal
//!   sequence of vertex-marking steps is weighted by
//!   `(number of mark choices) / (trisections of the glued object)`, and the
//!   weighted sum over paths and splits is exactly `B_g(n)`.
//!
//! The two routes share nothing beyond binomials, so their agreement (tested
//! exhaustively for small parameters) certifies both the closed counting and
//! the surgery bookkeeping that the random sampler relies on.  All
//! arithmetic is exact; the recursions divide by their leading coefficients
//! only after checking divisibility.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, BigUint, One, Zero};

use crate::CountError;

/// Binomial coefficient `C(n, k)` with `C(n, k) = 0` for `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * BigUint::from(n - k + i) / BigUint::from(i);
    }
    acc
}

/// Plane tree counts `ε₀(0..=max)` via the root-degree convolution
/// `ε₀(m+1) = Σ_i ε₀(i) ε₀(m−i)`.
pub fn plane_tree_counts(max: usize) -> Vec<BigUint> {
    let mut eps: Vec<BigUint> = Vec::with_capacity(max + 1);
    eps.push(BigUint::one());
    for m in 0..max {
        let next = (0..=m).map(|i| &eps[i] * &eps[m - i]).sum();
        eps.push(next);
    }
    eps
}

/// Number of plane trees with `m` edges.
pub fn plane_tree_count(m: usize) -> BigUint {
    plane_tree_counts(m).pop().expect("table is nonempty")
}

/// Unicellular counts `U_g(m)` for `g <= max_g`, `m <= max_m`.
///
/// Row zero is the plane-tree count; each higher genus satisfies
/// `2g · U_g(m) = Σ_{p=1}^{g} C(m+1−2(g−p), 2p+1) · U_{g−p}(m)`,
/// the marking identity behind the glue step that raises the genus of one
/// component.
#[derive(Debug, Clone)]
pub struct UnicellularTable {
    max_g: usize,
    max_m: usize,
    u: Vec<Vec<BigUint>>,
}

impl UnicellularTable {
    pub fn build(max_g: usize, max_m: usize) -> Result<Self, CountError> {
        let mut u = vec![plane_tree_counts(max_m)];
        for g in 1..=max_g {
            let mut row = Vec::with_capacity(max_m + 1);
            for m in 0..=max_m {
                let mut acc = BigUint::zero();
                for p in 1..=g {
                    let Some(markable) = (m + 1).checked_sub(2 * (g - p)) else {
                        continue;
                    };
                    acc += binomial(markable, 2 * p + 1) * &u[g - p][m];
                }
                let divisor = BigUint::from(2 * g);
                if (&acc % &divisor) != BigUint::zero() {
                    return Err(CountError::DivisibilityFailure { genus: g, n: m });
                }
                row.push(acc / divisor);
            }
            u.push(row);
        }
        Ok(UnicellularTable { max_g, max_m, u })
    }

    pub fn count(&self, g: usize, m: usize) -> Result<&BigUint, CountError> {
        if g > self.max_g || m > self.max_m {
            return Err(CountError::OutOfTableRange {
                built: self.max_m.min(self.max_g),
                requested: g.max(m),
            });
        }
        Ok(&self.u[g][m])
    }
}

/// Number of planted unicellular maps of genus `g` with `m` edges.
pub fn unicellular_count(g: usize, m: usize) -> Result<BigUint, CountError> {
    Ok(UnicellularTable::build(g, m)?.u[g][m].clone())
}

/// Sum over `k >= 1` on each side of `C(a, k) · C(b, 2δ+3−k)`: the number
/// of ways to distribute `2δ+3` marks over two components touching both.
fn connecting_mark_choices(a: usize, b: usize, delta: usize) -> BigUint {
    let mut acc = BigUint::zero();
    for k in 1..=2 * delta + 2 {
        acc += binomial(a, k) * binomial(b, 2 * delta + 3 - k);
    }
    acc
}

/// Bicellular counts `B_g(n)` for `g <= max_g`, `n <= max_n`, via the genus
/// recursion
///
/// ```text
/// 2(g+1)·B_g(n) = Σ_{i<g} C(n−2i, 2(g−i)+1)·B_i(n)
///               + Σ_{i<=g} Σ_{g₁<=i} Σ_{m<=n}
///                   conn(g−i; m+1−2g₁, n−m+1−2(i−g₁)) · U_{g₁}(m)·U_{i−g₁}(n−m)
/// ```
///
/// where `conn` is [`connecting_mark_choices`].
#[derive(Debug, Clone)]
pub struct BicellularTable {
    max_g: usize,
    max_n: usize,
    b: Vec<Vec<BigUint>>,
}

impl BicellularTable {
    pub fn build(max_g: usize, max_n: usize) -> Result<Self, CountError> {
        let unis = UnicellularTable::build(max_g, max_n)?;
        let mut b: Vec<Vec<BigUint>> = Vec::with_capacity(max_g + 1);
        for g in 0..=max_g {
            let mut row = Vec::with_capacity(max_n + 1);
            for n in 0..=max_n {
                let mut acc = BigUint::zero();
                for i in 0..g {
                    let Some(markable) = n.checked_sub(2 * i) else {
                        continue;
                    };
                    acc += binomial(markable, 2 * (g - i) + 1) * &b[i][n];
                }
                for i in 0..=g {
                    let delta = g - i;
                    for g1 in 0..=i {
                        let g2 = i - g1;
                        for m in 0..=n {
                            let Some(mu) = (m + 1).checked_sub(2 * g1) else {
                                continue;
                            };
                            let Some(nu) = (n - m + 1).checked_sub(2 * g2) else {
                                continue;
                            };
                            let pairs = unis.u[g1][m].clone() * &unis.u[g2][n - m];
                            if pairs.is_zero() {
                                continue;
                            }
                            acc += connecting_mark_choices(mu, nu, delta) * pairs;
                        }
                    }
                }
                let divisor = BigUint::from(2 * (g + 1));
                if (&acc % &divisor) != BigUint::zero() {
                    return Err(CountError::DivisibilityFailure { genus: g, n });
                }
                row.push(acc / divisor);
            }
            b.push(row);
        }
        Ok(BicellularTable { max_g, max_n, b })
    }

    pub fn count(&self, g: usize, n: usize) -> Result<&BigUint, CountError> {
        if g > self.max_g || n > self.max_n {
            return Err(CountError::OutOfTableRange {
                built: self.max_n.min(self.max_g),
                requested: g.max(n),
            });
        }
        Ok(&self.b[g][n])
    }
}

/// Number of planted bicellular maps of genus `g` with `n` arcs, via the
/// genus recursion.
pub fn bicellular_count(g: usize, n: usize) -> Result<BigUint, CountError> {
    Ok(BicellularTable::build(g, n)?.b[g][n].clone())
}

/// A stage of the gluing pipeline.  `Pair` is two planted unicellular
/// components of total genus `total`, the first of genus `first`;
/// `Connected` is one planted bicellular map of genus `total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathState {
    Pair { total: usize, first: usize },
    Connected { total: usize },
}

/// The four macro glue moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GlueKind {
    /// Raise the genus of the first component by `delta`.
    RaiseFirst,
    /// Raise the genus of the second component by `delta`.
    RaiseSecond,
    /// Join the two components into one bicellular map, raising total genus
    /// by `delta`.
    Connect,
    /// Raise the genus of the connected map by `delta`.
    RaiseConnected,
}

/// One admissible macro glue move out of a state.
#[derive(Debug, Clone)]
pub struct GlueTransition {
    pub kind: GlueKind,
    pub delta: usize,
    pub target: PathState,
    /// Number of admissible mark subsets for this move.
    pub subsets: BigUint,
    /// Number of trisections of the object the move produces; the inverse
    /// slice has exactly this many entry points.
    pub multiplicity: usize,
}

/// Markable vertices of a planted unicellular component: every vertex
/// except the plant tip, `m + 1 − 2g` of them.
pub fn unicellular_markable(edges: usize, genus: usize) -> Option<usize> {
    (edges + 1).checked_sub(2 * genus)
}

/// Markable vertices of a planted bicellular map: every vertex except the
/// two plant tips, `n − 2g` of them.
pub fn bicellular_markable(arcs: usize, genus: usize) -> Option<usize> {
    arcs.checked_sub(2 * genus)
}

/// All glue moves with a nonzero number of mark choices out of `state`,
/// for `n` arcs total, `split` of them in the first component, target genus
/// `g`.  `split` is ignored for `Connected` states.
pub fn glue_transitions(
    state: PathState,
    n: usize,
    split: usize,
    g: usize,
) -> Vec<GlueTransition> {
    let mut out = Vec::new();
    match state {
        PathState::Pair { total, first } => {
            let second = total - first;
            let mark_a = unicellular_markable(split, first).unwrap_or(0);
            let mark_b = unicellular_markable(n - split, second).unwrap_or(0);
            for delta in 1..=g.saturating_sub(total) {
                let subsets = binomial(mark_a, 2 * delta + 1);
                if !subsets.is_zero() {
                    out.push(GlueTransition {
                        kind: GlueKind::RaiseFirst,
                        delta,
                        target: PathState::Pair {
                            total: total + delta,
                            first: first + delta,
                        },
                        subsets,
                        multiplicity: 2 * (first + delta),
                    });
                }
                // Raises of the second component are only legal while the
                // first is still a tree: the slicing direction reduces the
                // first component before touching the second, so any other
                // interleaving would double-count glue paths.
                if first == 0 {
                    let subsets = binomial(mark_b, 2 * delta + 1);
                    if !subsets.is_zero() {
                        out.push(GlueTransition {
                            kind: GlueKind::RaiseSecond,
                            delta,
                            target: PathState::Pair {
                                total: total + delta,
                                first,
                            },
                            subsets,
                            multiplicity: 2 * (second + delta),
                        });
                    }
                }
            }
            for delta in 0..=g.saturating_sub(total) {
                let subsets = connecting_mark_choices(mark_a, mark_b, delta);
                if !subsets.is_zero() {
                    out.push(GlueTransition {
                        kind: GlueKind::Connect,
                        delta,
                        target: PathState::Connected {
                            total: total + delta,
                        },
                        subsets,
                        multiplicity: 2 * (total + delta) + 2,
                    });
                }
            }
        }
        PathState::Connected { total } => {
            let markable = bicellular_markable(n, total).unwrap_or(0);
            for delta in 1..=g.saturating_sub(total) {
                let subsets = binomial(markable, 2 * delta + 1);
                if !subsets.is_zero() {
                    out.push(GlueTransition {
                        kind: GlueKind::RaiseConnected,
                        delta,
                        target: PathState::Connected {
                            total: total + delta,
                        },
                        subsets,
                        multiplicity: 2 * (total + delta) + 2,
                    });
                }
            }
        }
    }
    out
}

fn ratio(subsets: &BigUint, multiplicity: usize) -> BigRational {
    BigRational::new(
        BigInt::from(subsets.clone()),
        BigInt::from(multiplicity),
    )
}

/// Suffix weights `F(Connected{t})` for `t = 0..=g`: the weighted number of
/// glue paths from a connected genus-`t` map to a connected genus-`g` map,
/// each macro move weighted by `subsets / multiplicity`.  Independent of the
/// split.
pub fn connected_weights(n: usize, g: usize) -> Vec<BigRational> {
    let mut f = vec![BigRational::zero(); g + 1];
    f[g] = BigRational::one();
    for t in (0..g).rev() {
        let mut acc = BigRational::zero();
        for tr in glue_transitions(PathState::Connected { total: t }, n, 0, g) {
            let PathState::Connected { total } = tr.target else {
                unreachable!("connected states only reach connected states");
            };
            acc += ratio(&tr.subsets, tr.multiplicity) * &f[total];
        }
        f[t] = acc;
    }
    f
}

/// Suffix weights for every state reachable with `split` arcs in the first
/// component, including the `Connected` states passed in.
pub fn split_weights(
    n: usize,
    split: usize,
    g: usize,
    connected: &[BigRational],
) -> BTreeMap<PathState, BigRational> {
    assert_eq!(connected.len(), g + 1);
    let mut f = BTreeMap::new();
    for (t, w) in connected.iter().enumerate() {
        f.insert(PathState::Connected { total: t }, w.clone());
    }
    for total in (0..=g).rev() {
        for first in 0..=total {
            let state = PathState::Pair { total, first };
            let mut acc = BigRational::zero();
            for tr in glue_transitions(state, n, split, g) {
                let target = f
                    .get(&tr.target)
                    .expect("transitions increase total or leave the pair stage");
                acc += ratio(&tr.subsets, tr.multiplicity) * target;
            }
            f.insert(state, acc);
        }
    }
    f
}

/// Root weight `F_split(Pair{0,0})`: the weighted glue paths from a pair of
/// plane trees with `split` and `n − split` edges up to a connected
/// genus-`g` map.
pub fn split_root_weight(
    n: usize,
    split: usize,
    g: usize,
    connected: &[BigRational],
) -> BigRational {
    split_weights(n, split, g, connected)
        .remove(&PathState::Pair { total: 0, first: 0 })
        .expect("root state is always present")
}

/// `B_g(n)` by the transfer-matrix route:
/// `Σ_split ε₀(split) · ε₀(n − split) · F_split(Pair{0,0})`.
///
/// Fails with [`CountError::DivisibilityFailure`] if the weighted sum is
/// not an integer, which would falsify the surgery bookkeeping.
pub fn bicellular_count_paths(g: usize, n: usize) -> Result<BigUint, CountError> {
    let connected = connected_weights(n, g);
    let eps = plane_tree_counts(n);
    let mut total = BigRational::zero();
    for split in 0..=n {
        let trees = BigInt::from(&eps[split] * &eps[n - split]);
        total += BigRational::from(trees) * split_root_weight(n, split, g, &connected);
    }
    if !total.is_integer() {
        return Err(CountError::DivisibilityFailure { genus: g, n });
    }
    Ok(total
        .to_integer()
        .to_biguint()
        .expect("path weights are nonnegative"))
}

/// Diagram counts by arc number: `δ_g(ℓ, n) = C(ℓ, ℓ−2n) · B_g(n)` for
/// `n = 1..=ℓ/2`, counting canonical-boundary diagrams of total length `ℓ`
/// with a connected core of genus `g`.
pub fn diagram_counts(g: usize, total_len: usize) -> Result<Vec<(usize, BigUint)>, CountError> {
    let table = BicellularTable::build(g, total_len / 2)?;
    Ok((1..=total_len / 2)
        .map(|n| {
            let count = binomial(total_len, total_len - 2 * n) * &table.b[g][n];
            (n, count)
        })
        .collect())
}

/// Total number of canonical-boundary diagrams of length `ℓ`, genus `g`.
pub fn diagram_count_total(g: usize, total_len: usize) -> Result<BigUint, CountError> {
    Ok(diagram_counts(g, total_len)?
        .into_iter()
        .map(|(_, c)| c)
        .sum())
}
