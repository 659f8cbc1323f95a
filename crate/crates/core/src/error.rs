//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("filter taps leak outside the expected support (residual {residual:.3e})")]
    NumericalResidual { residual: f64 },

    #[error("spectral factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("|psi_h({lambda})| is too small to normalize the analyticity defect")]
    DegenerateDenominator { lambda: f64 },

    #[error("input has {n} samples, at least {required} are needed")]
    InputTooShort { n: usize, required: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },

    #[error("pyramid has no coefficients at any scale")]
    EmptyPyramid,

    #[error("scale {j} has a non-positive diagonal entry")]
    DegenerateScale { j: usize },

    #[error("no coefficients between scales {j0} and {j1}")]
    EmptyScales { j0: usize, j1: usize },

    #[error("delta = {delta} lies outside the convergence strip ({lo}, {hi})")]
    DomainError { delta: f64, lo: f64, hi: f64 },

    #[error("G(d) is not positive definite")]
    SingularG,

    #[error("optimizer did not converge after {iterations} iterations (best d = {best:?})")]
    OptimizerDidNotConverge { best: Vec<f64>, iterations: usize },

    #[error("u-series tail {tail:.3e} exceeds tolerance")]
    SeriesNotConverged { tail: f64 },

    #[error("memory parameter {0} must exceed -0.5")]
    InvalidD(f64),

    #[error("innovation covariance is not positive semi-definite")]
    NonPsdSigma,

    #[error("spectral matrix is not positive semi-definite at lambda = {lambda}")]
    NonPsdSpectrum { lambda: f64 },

    #[error("all {reps} replications failed")]
    AllReplicationsFailed { reps: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Numerical failures map to exit code 2, everything else to 1.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalResidual { .. }
                | Error::FactorizationFailed(_)
                | Error::DegenerateDenominator { .. }
                | Error::DegenerateScale { .. }
                | Error::SingularG
                | Error::OptimizerDidNotConverge { .. }
                | Error::SeriesNotConverged { .. }
                | Error::NonPsdSpectrum { .. }
                | Error::AllReplicationsFailed { .. }
        )
    }

    /// Short machine-readable name used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NumericalResidual { .. } => "NumericalResidual",
            Error::FactorizationFailed(_) => "FactorizationFailed",
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::InputTooShort { .. } => "InputTooShort",
            Error::NonFiniteInput { .. } => "NonFiniteInput",
            Error::EmptyPyramid => "EmptyPyramid",
            Error::DegenerateScale { .. } => "DegenerateScale",
            Error::EmptyScales { .. } => "EmptyScales",
            Error::DomainError { .. } => "DomainError",
            Error::SingularG => "SingularG",
            Error::OptimizerDidNotConverge { .. } => "OptimizerDidNotConverge",
            Error::SeriesNotConverged { .. } => "SeriesNotConverged",
            Error::InvalidD(_) => "InvalidD",
            Error::NonPsdSigma => "NonPsdSigma",
            Error::NonPsdSpectrum { .. } => "NonPsdSpectrum",
            Error::AllReplicationsFailed { .. } => "AllReplicationsFailed",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Parse(_) => "Parse",
        }
    }
}
