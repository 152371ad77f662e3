use thiserror::Error;

/// Errors produced by the workbench library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("numeric failure: {message} (residual {residual:.3e})")]
    NumericFailure { message: String, residual: f64 },

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("incompatible weights: {0}")]
    IncompatibleWeights(String),

    #[error("invalid arity {0}: at least 2 inputs are required")]
    InvalidArity(usize),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("index out of range: {0}")]
    IndexRange(String),

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("order degenerate: {0}")]
    OrderDegenerate(String),

    #[error("composability: {0}")]
    Composability(String),

    #[error("degree shift violated: {0}")]
    DegreeShift(String),

    #[error("object map mismatch: {0}")]
    ObjectMismatch(String),

    #[error("action gap undefined: spectrum has no nonconstant class")]
    UndefinedGap,

    #[error("invalid cutoff {0}: must be negative")]
    InvalidCutoff(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("degenerate window: {0}")]
    DegenerateWindow(String),

    #[error("point outside chart: {0}")]
    OutsideChart(String),

    #[error("not lagrangian: {0}")]
    NotLagrangian(String),

    #[error("not symplectic: {0}")]
    NotSymplectic(String),

    #[error("degenerate crossing at t = {t}: {message}")]
    DegenerateCrossing { t: f64, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
