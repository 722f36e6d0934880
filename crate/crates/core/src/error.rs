use std::fmt;

use crate::values::Value;

/// Which precondition of a gluing construction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// The shared subset is empty.
    NonEmptyIntersection,
    /// The two metrics disagree on the shared subset.
    Agreement,
    /// Some point outside the shared subset is not at the prescribed distance from it.
    Equidistance,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Hypothesis::NonEmptyIntersection => "non-empty intersection",
            Hypothesis::Agreement => "agreement",
            Hypothesis::Equidistance => "equidistance",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot parse value {0:?}")]
    Parse(String),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("strong triangle inequality violated: d({x},{y}) > d({x},{z}) ∨ d({z},{y})")]
    TriangleViolation { x: String, y: String, z: String },

    #[error("distance d({x},{y}) = {value} is not in the range set")]
    NotInRangeSet { x: String, y: String, value: Value },

    #[error("value {0} is not a positive element of the range set")]
    NotPositiveElement(Value),

    #[error("zero distance between distinct points {x} and {y}")]
    ZeroOffDiagonal { x: String, y: String },

    #[error("matrix is not symmetric at ({x},{y})")]
    Asymmetric { x: String, y: String },

    #[error("non-zero diagonal entry at {0}")]
    NonZeroDiagonal(String),

    #[error("matrix shape does not match {expected} points")]
    Shape { expected: usize },

    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown point label {0:?}")]
    UnknownPoint(String),

    #[error("subset must be non-empty")]
    EmptySubset,

    #[error("{0} exceeds every element of the range set")]
    OutOfRange(Value),

    #[error("range set has no strictly decreasing null sequence")]
    NoCoinitiality,

    #[error("expected a positive value, got {0}")]
    NonPositive(Value),

    #[error("the two spaces use different range sets")]
    RangeSetMismatch,

    #[error("the two metrics live on different point sets")]
    PointSetMismatch,

    #[error("hypothesis violated ({which}): {detail}")]
    HypothesisViolation { which: Hypothesis, detail: String },

    #[error("UD = {ud} exceeds the bound {bound}")]
    BoundViolation { ud: Box<Value>, bound: Box<Value> },

    #[error("range set has no positive element")]
    EmptyPositivePart,

    #[error("independence rank {rank} is below {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("subsets are not pairwise disjoint (shared point {0:?})")]
    DisjointnessViolation(String),

    #[error("need at least two points")]
    TooSmall,

    #[error("no witness found")]
    NoWitnessFound,

    #[error("no element of the target range set within tolerance of {0}")]
    ApproximationImpossible(Value),

    #[error("radii never drop to {0}")]
    TailNotFound(Value),

    #[error("block {block} has diameter {diameter} above its budget {budget}")]
    DiameterViolation { block: usize, diameter: Box<Value>, budget: Box<Value> },

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("postcondition failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
