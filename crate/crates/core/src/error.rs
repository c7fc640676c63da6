use thiserror::Error;

/// Errors shared across the geometric and algebraic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cross-ratio denominator vanishes")]
    DegenerateCrossRatio,
    #[error("points are not collinear")]
    NotCollinear,
    #[error("points coincide projectively")]
    CoincidentPoints,
    #[error("lines coincide projectively")]
    CoincidentLines,
    #[error("singular projective map")]
    SingularMap,
    #[error("polynomial arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("evaluation point lies on a pole")]
    PoleAtPoint,
    #[error("degenerate configuration at index {0}")]
    DegenerateConfiguration(usize),
    #[error("operation requires n not divisible by 3")]
    DivisibleByThree,
    #[error("operation requires n divisible by 3")]
    NotDivisibleByThree,
    #[error("cyclic triple-product system needs an irrational cube root in exact mode")]
    NonRationalLift,
    #[error("recurrence degenerated at step {0}")]
    DegenerateRecurrence(usize),
    #[error("zero recurrence coefficient at index {0}")]
    ZeroCoefficient(usize),
    #[error("zero coordinate at index {0}")]
    ZeroCoordinate(usize),
    #[error("pentagram map singular at index {0} (x_i y_i = 1)")]
    MapSingularity(usize),
    #[error("rescaling by zero")]
    ZeroScale,
    #[error("degenerate diagonals at index {0}")]
    DegenerateDiagonals(usize),
    #[error("image polygon violates the 3-in-a-row condition at index {0}")]
    LostGenericity(usize),
    #[error("eigenvalues must satisfy 0 < a < 1 < b")]
    InvalidEigenvalues,
    #[error("invalid generator parameters")]
    InvalidParameters,
    #[error("monodromy is not the identity")]
    NotClosed,
    #[error("field norm blow-up during time stepping")]
    Instability,
    #[error("non-finite field value")]
    NonFinite,
    #[error("series fit is ill-conditioned")]
    IllConditionedFit,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
