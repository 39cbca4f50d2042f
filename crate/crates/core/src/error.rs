use thiserror::Error;

/// Errors raised by geometric operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies in the kernel of the map (distance {distance:.3e})")]
    KernelHit { distance: f64 },

    #[error("sequence has no limit: tail deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NoLimit { deviation: f64, tolerance: f64 },

    #[error("points are not collinear (singular value ratio {ratio:.3e})")]
    NotCollinear { ratio: f64 },

    #[error("coincident points: {0}")]
    Coincident(String),

    #[error("point is not in the interior of the domain")]
    NotInterior,

    #[error("point is not on the boundary of the domain (offset {offset:.3e})")]
    NotOnBoundary { offset: f64 },

    #[error("supporting hyperplane could not be certified: {0}")]
    Uncertified(String),

    #[error("convex sum requires disjoint projective supports")]
    OverlappingSupports,

    #[error("map is singular")]
    Singular,

    #[error("map does not preserve the domain: {0}")]
    NotPreserved(String),

    #[error("map does not fix the horosphere data: {0}")]
    NotFixed(String),

    #[error("no real logarithm: {0}")]
    NoRealLogarithm(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ray hit a deleted boundary segment ending at the horosphere center")]
    DeletedSegmentHit,

    #[error("graph construction failed: {0}")]
    GraphConstruction(String),

    #[error("asymptotic cone is empty")]
    EmptyCone,

    #[error("unknown catalog id: {0}")]
    UnknownId(String),

    #[error("inconsistent family: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
