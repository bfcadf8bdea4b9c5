use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes of the reduction pipeline and its numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("invalid rank: k must be < n (got k = {k}, n = {n})")]
    InvalidRank { k: usize, n: usize },

    #[error("Stein iteration does not converge: spectral radius {radius} is not below 1")]
    NonConvergent { radius: f64 },

    #[error("spectral radius {radius} is not below 1")]
    SpectralRadiusTooLarge { radius: f64 },

    #[error("Sylvester equation is singular: spectra overlap (separation {separation:e})")]
    SingularSystem { separation: f64 },

    #[error("eigenvalue of modulus {modulus} lies on the unit circle")]
    EigenvalueOnCircle { modulus: f64 },

    #[error("automaton is not minimal: {states} states but rank {rank}")]
    NotMinimal { states: usize, rank: usize },

    #[error(
        "index {k} lies strictly inside the multiplicity group [{start}, {end}); \
         choose k = {start} or k = {end}"
    )]
    GroupNotAtBoundary { k: usize, start: usize, end: usize },

    #[error("core matrix of the auxiliary automaton is numerically singular")]
    SingularCore,

    #[error("expected {expected} eigenvalues inside the unit disc, found {found}")]
    InertiaMismatch { expected: usize, found: usize },

    #[error("evaluation point is within {distance:e} of a pole")]
    NearPole { distance: f64 },

    #[error("denominator of the error ratio vanishes at the evaluation point")]
    NearZeroDenominator,

    #[error("Laurent expansion did not converge (coefficient change {change:e})")]
    ExpansionNotConverged { change: f64 },

    #[error("real Schur iteration did not converge")]
    SchurNotConverged,

    #[error("transition matrix is singular and cannot be inverted")]
    SingularTransition,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract user input,
    /// as opposed to numerical breakdowns on valid input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::NonFinite(_)
                | Error::InvalidAutomaton(_)
                | Error::InvalidRank { .. }
                | Error::GroupNotAtBoundary { .. }
                | Error::Parse(_)
        )
    }

    /// Stable machine-readable identifier.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::InvalidAutomaton(_) => "InvalidAutomaton",
            Error::InvalidRank { .. } => "InvalidRank",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::SpectralRadiusTooLarge { .. } => "SpectralRadiusTooLarge",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::EigenvalueOnCircle { .. } => "EigenvalueOnCircle",
            Error::NotMinimal { .. } => "NotMinimal",
            Error::GroupNotAtBoundary { .. } => "GroupNotAtBoundary",
            Error::SingularCore => "SingularCore",
            Error::InertiaMismatch { .. } => "InertiaMismatch",
            Error::NearPole { .. } => "NearPole",
            Error::NearZeroDenominator => "NearZeroDenominator",
            Error::ExpansionNotConverged { .. } => "ExpansionNotConverged",
            Error::SchurNotConverged => "SchurNotConverged",
            Error::SingularTransition => "SingularTransition",
            Error::Parse(_) => "Parse",
        }
    }
}
