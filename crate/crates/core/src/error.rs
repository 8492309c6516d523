use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by validation, decompositions and the numerical searches.
///
/// Magnitudes are reported in binary64 regardless of the scalar type used.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is not one (|tr - 1| = {deviation:e})")]
    NotUnitTrace { deviation: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("vector is not normalized (|<v|v> - 1| = {deviation:e})")]
    NotNormalized { deviation: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    ConvergenceFailure { sweeps: usize, off_diagonal: f64 },
    #[error("vector lies outside the support (orthogonal component {residual:e})")]
    OutsideSupport { residual: f64 },
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("no convergence after {rounds} rounds (figure of merit {merit:e})")]
    NoConvergence { rounds: usize, merit: f64 },
    #[error("interpolation endpoints are antipodal")]
    PathDegenerate,
    #[error("1 - tr(rho sigma) = {value:e} is negative")]
    RadicandOutOfRange { value: f64 },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("rank {found} not supported here (expected {expected})")]
    RankMismatch { expected: String, found: usize },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("computed value contradicts a proven bound: {0}")]
    TheoremViolation(String),
}

impl Error {
    /// Stable identifier used in machine-readable error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotUnitTrace { .. } => "NotUnitTrace",
            Error::NotPsd { .. } => "NotPSD",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::OutsideSupport { .. } => "OutsideSupport",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::PathDegenerate => "PathDegenerate",
            Error::RadicandOutOfRange { .. } => "RadicandOutOfRange",
            Error::InvalidDecomposition(_) => "InvalidDecomposition",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::RankMismatch { .. } => "RankMismatch",
            Error::Parse(_) => "ParseError",
            Error::TheoremViolation(_) => "TheoremViolation",
        }
    }
}
