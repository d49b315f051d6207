use thiserror::Error;

/// Errors raised by the estimators and generators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty set")]
    EmptySet,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("no points at this scale (center restriction to radius {radius} is empty)")]
    NoPointsAtScale { radius: f64 },

    #[error("jacobian undefined at origin")]
    JacobianAtOrigin,

    #[error("degenerate Jacobian (|det| = {det:e})")]
    DegenerateJacobian { det: f64 },

    #[error("all sampled triples were degenerate")]
    AllTriplesSkipped,

    #[error("containment violated: sampled |g(x)| = {max_norm} exceeds 1 + 1e-6")]
    ContainmentViolated { max_norm: f64 },

    #[error("outside Grötzsch domain: t = {0} must exceed 1")]
    OutsideGrotzschDomain(f64),

    #[error("log weight undefined: profile value {value} > 1 at t = {t}")]
    LogWeightUndefined { t: f64, value: f64 },

    #[error("A too large for t0: phi^2 = {phi_sq} >= 1")]
    ATooLargeForT0 { phi_sq: f64 },

    #[error("inversion bracket failure: {0}")]
    BracketFailure(String),

    #[error("insufficient scale span: {0}")]
    InsufficientScaleSpan(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
