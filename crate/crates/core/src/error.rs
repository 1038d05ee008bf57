use thiserror::Error;

/// Errors raised by the library.
///
/// Numerical gate failures carry the offending magnitude so callers can
/// report it instead of a bare "failed".
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("surface (genus {genus}, punctures {punctures}) is not hyperbolic: Euler characteristic {chi} >= 0")]
    NotHyperbolic { genus: u32, punctures: u32, chi: i64 },

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(String),

    #[error("multicurve weight must be positive, got {0}")]
    NonPositiveWeight(String),

    #[error("multicurve repeats the curve {0}")]
    DuplicateCurve(String),

    #[error("invalid train track: {0}")]
    InvalidTrack(String),

    #[error("switch relation violated at switch {switch}: a(in) = {incoming}, a(out+) + a(out-) = {outgoing}")]
    SwitchViolation {
        switch: usize,
        incoming: String,
        outgoing: String,
    },

    #[error("linear constraint {row} violated: value {value}")]
    ConstraintViolation { row: usize, value: String },

    #[error("weight vector has {got} entries, track has {expected} edges")]
    WeightLength { expected: usize, got: usize },

    #[error("negative strand count {count} on edge {edge}")]
    NegativeCount { edge: usize, count: String },

    #[error("weight systems live on different train tracks")]
    TrackMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("length {value} at index {index} must be positive")]
    NonPositiveLength { index: usize, value: f64 },

    #[error("elliptic element: |tr| = {0} < 2")]
    Elliptic(f64),

    #[error("relator residual {residual:e} exceeds tolerance {tolerance:e}")]
    RelatorResidual { residual: f64, tolerance: f64 },

    #[error("cocycle residual {residual:e} exceeds tolerance {tolerance:e}")]
    CocycleResidual { residual: f64, tolerance: f64 },

    #[error("unknown chart curve {0}")]
    UnknownCurve(String),

    #[error("multicurve component {0} is not a pants curve of the chart")]
    NotPantsSupported(String),

    #[error("lamination data is incompatible with the chart: {0}")]
    IncompatibleLamination(String),

    #[error("negative bending weight on edge {0}")]
    NegativeBending(usize),

    #[error("pairing requires a closed surface with one relator; got {0}")]
    PuncturedPresentation(String),

    #[error("pairing kind {kind} does not apply to {what}")]
    PairingKind { kind: String, what: String },

    #[error("finite-difference evaluation produced a non-finite value: {0}")]
    FiniteDifference(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("unknown check {0:?}")]
    UnknownCheck(String),

    #[error("testbed format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
