use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length of label {label} is not positive")]
    NonPositiveLength { label: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("permutation is reducible")]
    ReduciblePermutation,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("point outside [0,1)")]
    OutOfDomain,
    #[error("interval arithmetic cannot decide at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("orbit hits a discontinuity at step {step}")]
    SingularOrbit { step: usize },
    #[error("competing lengths are equal; the IET is not infinitely renormalizable")]
    TieLengths,
    #[error("step budget of {budget} exceeded")]
    StepBudgetExceeded { budget: usize },
    #[error("path step {index} does not start where the previous one ended")]
    PathMismatch { index: usize },
    #[error("no positive block within a window of {window} steps")]
    NonContractingPath { window: usize },
    #[error("return time exceeds the budget of {budget} iterates")]
    ReturnBudgetExceeded { budget: usize },
    #[error("frame vectors became linearly dependent")]
    DegenerateFrame,
    #[error("search budget exceeded{}", best_index.as_ref().map(|b| format!(" (best lattice index {b})")).unwrap_or_default())]
    BudgetExceeded { best_index: Option<String> },
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("piece count {pieces} exceeds the budget")]
    QuadratureBlowup { pieces: usize },
    #[error("permutation is not in a rotation class")]
    NotRotationClass,
    #[error("no gap of the required length; measured |H_N(J')| = {measure}")]
    NoGapFound { measure: f64 },
    #[error("N is too small for the construction")]
    TooSmallN,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveLength { .. } => "NonPositiveLength",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ReduciblePermutation => "ReduciblePermutation",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::OutOfDomain => "OutOfDomain",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::SingularOrbit { .. } => "SingularOrbit",
            Error::TieLengths => "TieLengths",
            Error::StepBudgetExceeded { .. } => "StepBudgetExceeded",
            Error::PathMismatch { .. } => "PathMismatch",
            Error::NonContractingPath { .. } => "NonContractingPath",
            Error::ReturnBudgetExceeded { .. } => "ReturnBudgetExceeded",
            Error::DegenerateFrame => "DegenerateFrame",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::StructureViolation(_) => "StructureViolation",
            Error::QuadratureBlowup { .. } => "QuadratureBlowup",
            Error::NotRotationClass => "NotRotationClass",
            Error::NoGapFound { .. } => "NoGapFound",
            Error::TooSmallN => "TooSmallN",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
        }
    }

    /// True for failures caused by the input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::ReduciblePermutation
                | Error::InvalidPermutation(_)
                | Error::NonPositiveLength { .. }
                | Error::OutOfDomain
                | Error::NotRotationClass
                | Error::InvalidArgument(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
