use thiserror::Error;

/// Errors from constructing, transforming, or (de)serializing constellations.
#[derive(Debug, Error)]
pub enum ConstellationError {
    #[error("dimension count {0} outside the supported range 1..=16")]
    DimensionOutOfRange(usize),
    #[error("seed coordinate at row {row}, dim {dim} must be strictly positive (got {value})")]
    NonPositiveSeedCoordinate { row: usize, dim: usize, value: f64 },
    #[error("labels must enumerate every {bits}-bit pattern exactly once")]
    IncompleteLabeling { bits: usize },
    #[error("label entries must be 0 or 1 (found {value} in row {row})")]
    InvalidLabelEntry { row: usize, value: u8 },
    #[error("point rows {a} and {b} are identical")]
    DuplicatePoint { a: usize, b: usize },
    #[error("matrix shape mismatch: {detail}")]
    ShapeMismatch { detail: String },
    #[error("constellation is empty or has zero mean energy")]
    Degenerate,
    #[error("unknown format '{0}'")]
    UnknownFormat(String),
    #[error("point count {0} is not a power of two, cannot assign binary labels")]
    NotPowerOfTwo(usize),
    #[error("{requested} points requested but only {available} lattice points within radius")]
    InsufficientLatticePoints { requested: usize, available: usize },
    #[error("self-check failed while constructing {format}: {detail}")]
    ConstructionMismatch { format: &'static str, detail: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Report returned when a constellation fails the orthant-symmetry test.
///
/// Not an error in the usual sense: callers probing symmetry receive the
/// first violated condition as a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotOrthantSymmetric {
    pub reason: String,
}

impl std::fmt::Display for NotOrthantSymmetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "not orthant-symmetric: {}", self.reason)
    }
}

impl std::error::Error for NotOrthantSymmetric {}
