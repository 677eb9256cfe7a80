use thiserror::Error;

/// Errors raised by network construction, operator assembly, integration and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {0} has degree zero")]
    ZeroDegree(usize),

    #[error("jump matrix row {row} sums to {sum}, expected 1")]
    JumpNotNormalized { row: usize, sum: f64 },

    #[error("jump probability on non-edge ({from}, {to})")]
    JumpOnNonEdge { from: usize, to: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("reaction rates evaluated outside their domain: {0}")]
    Domain(String),

    #[error("step size fell below dt_min = {dt_min:e} at t = {t}")]
    StepUnderflow { t: f64, dt_min: f64 },

    #[error("non-finite state at t = {0}")]
    NonFinite(f64),

    #[error("eigenvalue iteration did not converge ({0} eigenvalues outstanding)")]
    EigenNoConvergence(usize),

    #[error("eigensolver failed at s = {s}: {source}")]
    SweepFailure {
        s: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("singular or ill-conditioned system (condition estimate {0:e})")]
    Singular(f64),

    #[error("zero eigenspace has dimension {0}, expected 1")]
    ZeroModeDimension(usize),

    #[error("state is not steady: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotSteady { residual: f64, tolerance: f64 },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
