//! Exact combinatorics of two-backbone interaction structures of fixed
//! topological genus.
//!
//! The crate models an interaction structure as a *planted bicellular map*: a
//! connected fat graph on an orientable surface with exactly two boundary
//! faces, each carrying a plant (a dangling root edge) that pins the face and
//! kills automorphisms.  Everything else is derived from that object:
//!
//! * [`map`] — permutation-triple representation, genus, step
//!   classification, trisections;
//! * [`surgery`] — the slicing/gluing surgery that takes a genus-`g`
//!   bicellular map to a pair of plane trees and back, bijectively;
//! * [`counting`] — exact counting of maps, unicellular maps and diagrams
//!   with `BigUint` arithmetic, via two independent recurrences;
//! * [`sampler`] — exact uniform random generation built on the surgery;
//! * [`duality`] — the correspondence between maps and two-backbone chord
//!   diagrams (the front-end most callers want);
//! * [`stats`] — loop decomposition, stack extraction and shape projection
//!   of sampled diagrams, with histogram collection;
//! * [`oracle`] — brute-force enumerators used to validate all of the above
//!   on small instances.

pub mod counting;
pub mod duality;
mod error;
pub mod map;
pub mod oracle;
pub mod perm;
pub mod sampler;
pub mod stats;
pub mod surgery;

pub use error::{CountError, MapError, ParseError, SampleError, SurgeryError};
