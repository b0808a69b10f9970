use thiserror::Error;

/// Errors shared across the engine. Verdict failures (a nonzero bracket, a
/// failed axiom) are reported in result types, not through this enum.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("patch split mismatch")]
    SplitMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("point does not cover variable `{0}`")]
    MissingCoordinate(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric is not invertible")]
    SingularMetric,
    #[error("metric is not symmetric")]
    AsymmetricMetric,
    #[error("patch map is not invertible")]
    SingularMap,
    #[error("degenerate frame (zero Gram determinant)")]
    DegenerateFrame,
    #[error("frame has {got} vectors but the form needs at least {need}")]
    ArityUnderflow { need: usize, got: usize },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("normal vector is not g-orthogonal to the frame span")]
    NormalNotOrthogonal,
    #[error("point is off the zero section")]
    OffZeroSection,
    #[error("jet order {have} is insufficient, need at least {need}")]
    InsufficientJetOrder { need: u32, have: u32 },
    #[error("degree mismatch between forms ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("{0}")]
    Precondition(String),
}
