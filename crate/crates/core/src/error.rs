use thiserror::Error;

/// Errors produced by the simulator, the information measures and the
/// discrepancy evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register label `{0}` appears more than once")]
    LabelCollision(String),

    #[error("unknown register label `{0}`")]
    UnknownLabel(String),

    #[error("register `{label}` has dimension {dim}; dimensions must be >= 1")]
    ZeroDimension { label: String, dim: usize },

    #[error("register `{label}` has dimension {found}, expected {expected}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        found: usize,
    },

    #[error("matrix side {side} exceeds dim_cap {cap}")]
    DimCapExceeded { side: usize, cap: usize },

    #[error("global state has {len} amplitudes, limit is dim_cap^2 = {limit}")]
    StateTooLarge { len: usize, limit: usize },

    #[error("amplitude vector has length {found}, layout needs {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("not an isometry: max |V^dag V - I| = {0:e}")]
    NotIsometry(f64),

    #[error("signature mismatch: {0}")]
    Signature(String),

    #[error("layouts differ: {0}")]
    LayoutMismatch(String),

    #[error("label sets overlap on `{0}`")]
    OverlappingLabels(String),

    #[error("label set must not be empty")]
    EmptyLabelSet,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("constrained grid is empty")]
    EmptyGrid,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors signalling that an instance is too large to simulate
    /// densely or enumerate exhaustively.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::DimCapExceeded { .. } | Error::StateTooLarge { .. } | Error::SizeLimit(_))
    }
}
