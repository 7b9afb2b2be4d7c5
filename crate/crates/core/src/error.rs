use alloc::string::String;

/// Errors raised by the exact construction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    ZeroDivisor,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("direction vector is zero")]
    DegenerateDirection,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("point {index} has a zero coordinate")]
    ZeroCoordinate { index: usize },
    #[error("target selection did not certify at stage {stage}")]
    SteeringStuck { stage: usize },
    #[error("explicit target is outside the admissible ball at stage {stage}")]
    TargetUnreachable { stage: usize },
    #[error("explicit target {0} is not in K = Q* + iQ")]
    NotInK(String),
    #[error("stage {0} is not available")]
    StageOutOfRange(usize),
    #[error("point is not a constraint point")]
    NotPinned,
    #[error("point set is not closed under complex conjugation")]
    NotConjClosed,
    #[error("the origin is missing from the algebraic set")]
    OriginMissing,
    #[error("a point is listed as both algebraic and transcendental")]
    OverlapSV,
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("not enough points: {requested} stages requested, {available} available")]
    NotEnoughPoints { requested: usize, available: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
