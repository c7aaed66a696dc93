//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by lattice, section, quiver and moduli computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} exceptional classes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("centers not in general position: {0}")]
    GeneralPosition(String),

    #[error("invalid collection: {0}")]
    InvalidCollection(String),

    #[error("position {position} outside 1..={max}")]
    Range { position: usize, max: usize },

    #[error("strong left-orthogonality audit failed for {divisor}: {detail}")]
    SloViolation { divisor: String, detail: String },

    #[error("point {0} coincides with a blown-up center; supply a tangent direction")]
    AmbiguousPoint(String),

    #[error("invalid surface point: {0}")]
    InvalidPoint(String),

    #[error("inadmissible weight: {0}")]
    Inadmissible(String),

    #[error("fullness audit failed for pair ({source_vertex}, {target_vertex}): span {span}, expected {expected}")]
    Fullness {
        source_vertex: usize,
        target_vertex: usize,
        span: usize,
        expected: usize,
    },

    #[error("blow-down map construction failed: {0}")]
    BlowDown(String),

    #[error("fiber analysis failed: {0}")]
    Analysis(String),

    #[error("size guard: {0}")]
    Size(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
