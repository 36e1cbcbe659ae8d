use thiserror::Error;

/// Errors raised while building or validating maps.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("permutation images must form a bijection on 0..{n}, got image {img} out of range")]
    ImageOutOfRange { n: usize, img: usize },
    #[error("permutation is not a bijection: value {img} appears twice")]
    DuplicateImage { img: usize },
    #[error("alpha must be a fixed-point-free involution: offending half-edge {hedge}")]
    AlphaNotInvolution { hedge: usize },
    #[error("alpha and sigma act on different half-edge sets ({a} vs {b})")]
    SizeMismatch { a: usize, b: usize },
    #[error("half-edge count {h} is odd; edges pair half-edges")]
    OddHalfEdges { h: usize },
    #[error("map is not connected")]
    NotConnected,
    #[error("expected {expected} faces, found {found}")]
    WrongFaceCount { expected: usize, found: usize },
    #[error("plant half-edge {hedge} is malformed: {reason}")]
    BadPlant { hedge: usize, reason: &'static str },
    #[error("arc list is not a perfect matching of the non-plant half-edges")]
    BadMatching,
    #[error("arc endpoint {pos} out of range for {n} edges")]
    ArcOutOfRange { pos: usize, n: usize },
    #[error("backbone split {m} exceeds edge count {n}")]
    BadSplit { m: usize, n: usize },
}

/// Errors raised by the slicing/gluing surgery.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("half-edge {hedge} is not a trisection of this map")]
    NotATrisection { hedge: usize },
    #[error("trisection index {index} is out of range: the map has {count} trisections")]
    TrisectionIndex { index: usize, count: usize },
    #[error("gluing expects marked vertices on distinct cells, found {found} on one cell")]
    BadMarkDistribution { found: usize },
    #[error("mark placement does not match the recorded trace at step {step}")]
    MarkPlacementMismatch { step: usize },
    #[error("trace signature is not a legal slicing path: {reason}")]
    IllegalSignature { reason: String },
    #[error("trace is internally inconsistent: {reason}")]
    CorruptTrace { reason: String },
}

/// Errors raised by the exact counters.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("counting tables built for n <= {built}, requested n = {requested}")]
    OutOfTableRange { built: usize, requested: usize },
    #[error("recurrence produced a non-integer intermediate at genus {genus}, n = {n}")]
    DivisibilityFailure { genus: usize, n: usize },
}

/// Errors raised by the exact samplers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("no structure exists for genus {genus} with {n} arcs")]
    EmptyFamily { genus: usize, n: usize },
    #[error("diagram length {len} admits no diagram with genus {genus}")]
    EmptyDiagramFamily { len: usize, genus: usize },
}

/// Errors raised while parsing the textual map/diagram formats.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("integer field out of range: {0}")]
    Range(String),
    #[error("structure fails validation: {0}")]
    Invalid(String),
}

impl From<MapError> for ParseError {
    fn from(e: MapError) -> Self {
        ParseError::Invalid(e.to_string())
    }
}
