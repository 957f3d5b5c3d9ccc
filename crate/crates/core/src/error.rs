use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian (anti-Hermitian residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("zero vector is not allowed here")]
    ZeroVector,

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid Kraus operation: {0}")]
    InvalidOperation(String),

    #[error("algebras do not commute (max commutator {residual:.3e})")]
    NonCommuting { residual: f64 },

    #[error("not a projection: {0}")]
    NotProjection(String),

    #[error("observable has degenerate spectrum (min eigenvalue gap {gap:.3e})")]
    DegenerateSpectrum { gap: f64 },

    #[error("unknown site index {site} (net has {sites} sites)")]
    UnknownSite { site: usize, sites: usize },

    #[error("operation annihilates the state (acceptance probability {probability:.3e})")]
    NullOutcome { probability: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite value in input at {0}")]
    NonFinite(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
