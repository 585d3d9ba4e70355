use thiserror::Error;

/// Every failure the library can report.
///
/// Variants name the violated invariant so that the CLI can map them onto
/// exit codes (configuration vs. numerical failure).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFiniteInput(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("unsupported derivative order {0} (expected 1 or 2)")]
    InvalidOrder(u32),
    #[error("singular coefficient at t = {t}: {what}")]
    SingularCoefficient { t: f64, what: String },
    #[error("chirality violation: v = {0} but the chiral soliton requires v > 0")]
    ChiralityViolation(f64),
    #[error("width violation: v^2 - 2w = {0} must be positive")]
    WidthViolation(f64),
    #[error("degenerate velocity: v must be non-zero")]
    DegenerateVelocity,
    #[error("invalid time t = {t}: {reason}")]
    InvalidTime { t: f64, reason: String },
    #[error("boundary leak: |field| = {value:e} at the domain edge exceeds the decay gate {gate:e}")]
    BoundaryLeak { value: f64, gate: f64 },
    #[error("singular map point at t = {t}: {what}")]
    SingularMapPoint { t: f64, what: String },
    #[error("blow-up at t = {t}: max |psi| = {value:e}")]
    BlowUp { t: f64, value: f64 },
    #[error("insufficient records: need at least {needed}, got {got}")]
    InsufficientRecords { needed: usize, got: usize },
    #[error("incompatible source equation for {map}: {detail}")]
    IncompatibleSource { map: String, detail: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
    #[error("unknown claim '{0}'")]
    UnknownClaim(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BoundaryLeak { .. }
                | Error::BlowUp { .. }
                | Error::SingularCoefficient { .. }
                | Error::SingularMapPoint { .. }
        )
    }

    /// Stable machine-readable tag used in JSON error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFiniteInput(_) => "NonFiniteInput",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::SingularCoefficient { .. } => "SingularCoefficient",
            Error::ChiralityViolation(_) => "ChiralityViolation",
            Error::WidthViolation(_) => "WidthViolation",
            Error::DegenerateVelocity => "DegenerateVelocity",
            Error::InvalidTime { .. } => "InvalidTime",
            Error::BoundaryLeak { .. } => "BoundaryLeak",
            Error::SingularMapPoint { .. } => "SingularMapPoint",
            Error::BlowUp { .. } => "BlowUp",
            Error::InsufficientRecords { .. } => "InsufficientRecords",
            Error::IncompatibleSource { .. } => "IncompatibleSource",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Parse(_) => "Parse",
            Error::UnknownName { .. } => "UnknownName",
            Error::UnknownClaim(_) => "UnknownClaim",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
