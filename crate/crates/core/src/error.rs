use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("degenerate cutoff profile: {0}")]
    DegenerateProfile(String),

    #[error("non-finite integrand sample at {point:?}")]
    PoisonedSample { point: Vec<f64> },

    #[error("unknown matrix element `{0}`")]
    UnknownElement(String),

    #[error("missing matrix element `{0}`")]
    MissingElement(String),

    #[error("Gram matrix not positive definite after dropping null directions: {0}")]
    Conditioning(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("identity `{name}` violated: lhs {lhs:e} rhs {rhs:e} tolerance {tolerance:e}")]
    Identity {
        name: String,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
