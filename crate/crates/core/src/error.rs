use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mask contains no cells")]
    EmptyMask,
    #[error("basepoint is not an inside cell")]
    BasepointOutside,
    #[error("cell is not inside the domain")]
    CellOutside,
    #[error("unsupported dimension {0} (geometry supports 1..=3)")]
    UnsupportedDimension(usize),
    #[error("dimension {0} is too small (need m >= 2)")]
    DimensionTooSmall(usize),
    #[error("cell size must be positive and finite")]
    BadCellSize,
    #[error("length mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("radius must be positive")]
    NonpositiveRadius,
    #[error("atom lies outside the domain")]
    AtomOutside,
    #[error("tau must lie in (0, 1]")]
    BadTau,
    #[error("Koch angles must lie in (0, pi/2) and cover every level")]
    BadAngle,
    #[error("bump specification is infeasible")]
    InfeasibleSpec,
    #[error("domain has no candidate points")]
    EmptyDomain,
    #[error("point is not covered by any ball of the partition")]
    UncoveredPoint,
    #[error("data does not sum to zero (imbalance {0:e})")]
    Unbalanced(f64),
    #[error("component {component} has imbalance {imbalance:e} and cannot route it")]
    DisconnectedImbalance { component: usize, imbalance: f64 },
    #[error("flow data is not a dipole between the requested cells")]
    NotADipole,
    #[error("function is not mean-zero on component {component} (sum {sum:e})")]
    NotMeanZero { component: usize, sum: f64 },
    #[error("solver stopped after {0} iterations without reaching tolerance")]
    ToleranceNotReached(usize),
    #[error("instance has {cells} cells, brute force limit is {limit}")]
    TooLarge { cells: usize, limit: usize },
    #[error("exponent out of range")]
    BadExponent,
    #[error("level grid must span at least six decades")]
    GridTooNarrow,
    #[error("invalid input: {0}")]
    Invalid(&'static str),
}

impl Error {
    /// Stable variant name, used by front ends when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyMask => "EmptyMask",
            Error::BasepointOutside => "BasepointOutside",
            Error::CellOutside => "CellOutside",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::DimensionTooSmall(_) => "DimensionTooSmall",
            Error::BadCellSize => "BadCellSize",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::NonpositiveRadius => "NonpositiveRadius",
            Error::AtomOutside => "AtomOutside",
            Error::BadTau => "BadTau",
            Error::BadAngle => "BadAngle",
            Error::InfeasibleSpec => "InfeasibleSpec",
            Error::EmptyDomain => "EmptyDomain",
            Error::UncoveredPoint => "UncoveredPoint",
            Error::Unbalanced(_) => "Unbalanced",
            Error::DisconnectedImbalance { .. } => "DisconnectedImbalance",
            Error::NotADipole => "NotADipole",
            Error::NotMeanZero { .. } => "NotMeanZero",
            Error::ToleranceNotReached(_) => "ToleranceNotReached",
            Error::TooLarge { .. } => "TooLarge",
            Error::BadExponent => "BadExponent",
            Error::GridTooNarrow => "GridTooNarrow",
            Error::Invalid(_) => "Invalid",
        }
    }
}
