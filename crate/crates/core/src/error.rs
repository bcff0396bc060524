use thiserror::Error;

/// Everything that can go wrong inside the lab.
///
/// Variants group into the three CLI exit classes: validation (bad input or a
/// violated hypothesis), numerical failure, and inconclusive results.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{label}: {detail}")]
    Hypothesis { label: &'static str, detail: String },

    #[error("curve is not unit speed: |r'^2+z'^2-1| = {residual:.3e} at s = {s}")]
    NotUnitSpeed { s: f64, residual: f64 },

    #[error("quadrature did not reach tolerance (error estimate {estimate:.3e})")]
    Quadrature { estimate: f64 },

    #[error("no bound state found")]
    NoBoundState,

    #[error("box too small: {0}")]
    BoxTooSmall(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("certificate not found: {0}")]
    CertificateNotFound(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_)
            | Error::Domain(_)
            | Error::Hypothesis { .. }
            | Error::NotUnitSpeed { .. }
            | Error::GridTooCoarse(_)
            | Error::Schema(_)
            | Error::Io(_) => 2,
            Error::Quadrature { .. }
            | Error::NoBoundState
            | Error::BoxTooSmall(_)
            | Error::Fit(_)
            | Error::Factorization(_)
            | Error::NoConvergence(_) => 3,
            Error::CertificateNotFound(_) => 4,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
