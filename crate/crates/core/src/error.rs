use thiserror::Error;

/// Errors raised by the numerical and combinatorial layers.
///
/// Variant names are part of the CLI contract: [`Error::name`] is printed
/// verbatim on numerical failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial is on or near the discriminant: min root separation {separation:e} <= {tolerance:e}")]
    DiscriminantViolation { separation: f64, tolerance: f64 },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("branch of sqrt(P) could not be tracked continuously near z = {re} + {im}i")]
    BranchTrackingFailure { re: f64, im: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("trajectory start is within {radius:e} of zero {zero}")]
    StartTooCloseToZero { zero: usize, radius: f64 },

    #[error("trajectory structure is ambiguous: {0}")]
    AmbiguousStructure(String),

    #[error("differential has a saddle trajectory between zeros {0} and {1}")]
    NotSaddleFree(usize, usize),

    #[error("separatrix fans do not tile the polygon: {0}")]
    StructureInconsistent(String),

    #[error("subdominant solution in sector {sector} moved by {change:e} when the seed radius was doubled")]
    ConvergenceCheckFailure { sector: usize, change: f64 },

    #[error("asymptotic values violate genericity: {0}")]
    GenericityViolation(String),

    #[error("asymptotic ratio in sector {sector} did not stabilize by radius {radius}")]
    NoConvergence { sector: usize, radius: f64 },

    #[error("polygon with {m} marked points exceeds the supported range {min}..={max}")]
    SizeLimit { m: usize, min: usize, max: usize },

    #[error("arc {{{0}, {1}}} is not in the triangulation")]
    ArcNotInTriangulation(usize, usize),

    #[error("configuration is not generic with respect to arc {{{0}, {1}}}")]
    NonGeneric(usize, usize),

    #[error("mutation at an arc with X = -1 hits a pole of the transition map")]
    TransitionPole,

    #[error("finite-difference Jacobian drifted by {drift:.3} between h and h/2")]
    StepTooLarge { drift: f64 },

    #[error("invalid hbar: {0}")]
    InvalidHbar(String),

    #[error("not a valid triangulation: {0}")]
    InvalidTriangulation(String),
}

impl Error {
    /// Stable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DiscriminantViolation { .. } => "DiscriminantViolation",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::BranchTrackingFailure { .. } => "BranchTrackingFailure",
            Error::PreconditionViolation(_) => "PreconditionViolation",
            Error::StartTooCloseToZero { .. } => "StartTooCloseToZero",
            Error::AmbiguousStructure(_) => "AmbiguousStructure",
            Error::NotSaddleFree(..) => "NotSaddleFree",
            Error::StructureInconsistent(_) => "StructureInconsistent",
            Error::ConvergenceCheckFailure { .. } => "ConvergenceCheckFailure",
            Error::GenericityViolation(_) => "GenericityViolation",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SizeLimit { .. } => "SizeLimit",
            Error::ArcNotInTriangulation(..) => "ArcNotInTriangulation",
            Error::NonGeneric(..) => "NonGeneric",
            Error::TransitionPole => "TransitionPole",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::InvalidHbar(_) => "InvalidHbar",
            Error::InvalidTriangulation(_) => "InvalidTriangulation",
        }
    }

    /// Whether the error stems from malformed input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::PreconditionViolation(_)
                | Error::InvalidHbar(_)
                | Error::InvalidTriangulation(_)
                | Error::SizeLimit { .. }
                | Error::ArcNotInTriangulation(..)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
