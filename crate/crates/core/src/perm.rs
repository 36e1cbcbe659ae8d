//! Dense permutations on `{0, .., n-1}`.
//!
//! All map-level structure in this crate is carried by three permutations of
//! the half-edge set, so this module keeps the representation deliberately
//! minimal: an image vector, validated once on construction.

use crate::MapError;

/// A permutation of `{0, .., n-1}`, stored by its image vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    image: Vec<usize>,
}

impl Perm {
    /// The identity on `n` points.
    pub fn identity(n: usize) -> Self {
        Perm {
            image: (0..n).collect(),
        }
    }

    /// Builds a permutation from its image vector, checking bijectivity.
    pub fn from_image(image: Vec<usize>) -> Result<Self, MapError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &img in &image {
            if img >= n {
                return Err(MapError::ImageOutOfRange { n, img });
            }
            if seen[img] {
                return Err(MapError::DuplicateImage { img });
            }
            seen[img] = true;
        }
        Ok(Perm { image })
    }

    /// Builds a permutation on `n` points from disjoint cycles; points not
    /// mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, MapError> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= n {
                    return Err(MapError::ImageOutOfRange { n, img: x });
                }
                if touched[x] {
                    return Err(MapError::DuplicateImage { img: x });
                }
                touched[x] = true;
                image[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Perm { image })
    }

    /// Number of points acted on.
    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// Image of a single point.
    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// Read-only view of the image vector.
    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y] = x;
        }
        Perm { image: inv }
    }

    /// Composition `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose_after(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "composing permutations of unequal degree");
        let image = other.image.iter().map(|&y| self.image[y]).collect();
        Perm { image }
    }

    /// Disjoint cycle decomposition.  Each cycle is rotated to start at its
    /// smallest point and cycles are sorted by that point, so the output is
    /// canonical.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.image.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.image[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.image[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles (fixed points count as cycles).
    pub fn cycle_count(&self) -> usize {
        let n = self.image.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.image[x];
            }
        }
        count
    }

    /// True when the permutation is an involution without fixed points.
    pub fn is_involution_fpf(&self) -> bool {
        self.image
            .iter()
            .enumerate()
            .all(|(x, &y)| x != y && self.image[y] == x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_image_rejects_non_bijections() {
        assert_eq!(
            Perm::from_image(vec![0, 0, 1]),
            Err(MapError::DuplicateImage { img: 0 })
        );
        assert_eq!(
            Perm::from_image(vec![0, 3]),
            Err(MapError::ImageOutOfRange { n: 2, img: 3 })
        );
    }

    #[test]
    fn cycles_are_canonical() {
        let p = Perm::from_cycles(6, &[vec![2, 4], vec![1, 5, 3]]).unwrap();
        assert_eq!(p.cycles(), vec![vec![0], vec![1, 5, 3], vec![2, 4]]);
        assert_eq!(p.cycle_count(), 3);
    }

    #[test]
    fn compose_applies_right_factor_first() {
        // self = (0 1), other = (1 2); self∘other sends 1 ↦ 2, 2 ↦ 0.
        let a = Perm::from_cycles(3, &[vec![0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[vec![1, 2]]).unwrap();
        let c = a.compose_after(&b);
        assert_eq!(c.apply(0), 1);
        assert_eq!(c.apply(1), 2);
        assert_eq!(c.apply(2), 0);
    }

    #[test]
    fn inverse_round_trips() {
        let p = Perm::from_cycles(5, &[vec![0, 2, 3], vec![1, 4]]).unwrap();
        let id = p.compose_after(&p.inverse());
        assert_eq!(id, Perm::identity(5));
    }

    #[test]
    fn involution_detection() {
        let fpf = Perm::from_cycles(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert!(fpf.is_involution_fpf());
        let fixed = Perm::from_cycles(4, &[vec![0, 2]]).unwrap();
        assert!(!fixed.is_involution_fpf());
        let three = Perm::from_cycles(4, &[vec![0, 1, 2]]).unwrap();
        assert!(!three.is_involution_fpf());
    }

    #[test]
    fn from_cycles_rejects_repeats() {
        assert!(Perm::from_cycles(4, &[vec![0, 1], vec![1, 2]]).is_err());
    }
}
