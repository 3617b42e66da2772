use thiserror::Error;

pub type QResult<T> = Result<T, QError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("target out of range: qubit {target} on a {n}-qubit register")]
    TargetOutOfRange { target: usize, n: usize },
    #[error("duplicate targets {0:?}")]
    DuplicateTargets(Vec<usize>),
    #[error("{kind} expects {expected} target(s), got {got}")]
    Arity { kind: String, expected: usize, got: usize },
    #[error("{kind} expects {expected} parameter(s), got {got}")]
    Params { kind: String, expected: usize, got: usize },
    #[error("non-finite gate parameter")]
    NonFiniteParam,
    #[error("unknown gate kind: {0}")]
    UnknownGateKind(String),
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    QubitCountMismatch { expected: usize, got: usize },
    #[error("qubit count {0} outside the supported range 1..=8")]
    QubitCountOutOfRange(usize),
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("distribution is empty or has zero total weight")]
    EmptyDistribution,
    #[error("negative or non-finite weight in distribution")]
    NegativeWeight,
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("Kraus set is not trace preserving (max deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("Kraus operator dimension {got} does not match {expected}")]
    KrausDimension { expected: usize, got: usize },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("device validation failed: {0}")]
    InvalidDevice(String),
    #[error("circuit needs {circuit} qubits but the device has {device}")]
    CircuitTooWide { circuit: usize, device: usize },
    #[error("CX({control},{target}) is not on a device edge")]
    NonConformant { control: usize, target: usize },
    #[error("noise amplification factor must be >= 1, got {0}")]
    AmplificationBelowOne(f64),
    #[error("duplicate r values in extrapolation nodes")]
    DuplicateNodes,
    #[error("invalid extrapolation series: {0}")]
    InvalidSeries(String),
    #[error("calibration matrix is numerically singular (condition number {condition:.3e})")]
    SingularCalibration { condition: f64 },
    #[error("calibration matrix is not column stochastic: {0}")]
    NotStochastic(String),
    #[error("the {0} gate has no counterpart in the target gate set")]
    Unsupported(String),
}

impl From<serde_json::Error> for QError {
    fn from(e: serde_json::Error) -> Self {
        QError::Malformed(e.to_string())
    }
}
