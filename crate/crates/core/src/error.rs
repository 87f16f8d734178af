use std::path::PathBuf;

/// Errors produced by the numerics and the experiment pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("spectrum violates Hermitian symmetry (relative defect {defect:.3e} at mode {mode})")]
    NotHermitian { defect: f64, mode: usize },

    #[error("grid mismatch: expected {expected}, found {found}")]
    GridMismatch { expected: String, found: String },

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    InvalidAxis { axis: usize, dim: usize },

    #[error("eigenvalues collide (relative separation {separation:.3e}); use green_hat instead")]
    EigenvalueCollision { separation: f64 },

    #[error("matrix exponential overflow guard: ||A t||_1 = {norm:.3e}")]
    ExpOverflow { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("initial data violates positivity: min(u0) = {min_u:.6e}")]
    Positivity { min_u: f64 },

    #[error("concentration must be positive: found {value:.6e} at index {index}")]
    NonPositiveConcentration { index: usize, value: f64 },

    #[error("vector field is not a gradient: relative curl defect {defect:.3e}")]
    NotGradient { defect: f64 },

    #[error("reconstruction accumulator is at t = {accumulated}, requested t = {requested}")]
    TimeMismatch { accumulated: f64, requested: f64 },

    #[error("solution blew up at step {step} (t = {time}): {detail}")]
    BlowUp {
        step: usize,
        time: f64,
        detail: String,
    },

    #[error("insufficient window: {0}")]
    InsufficientWindow(String),

    #[error("nonpositive value {value:.3e} at t = {time} inside the fit window")]
    NonPositiveInWindow { time: f64, value: f64 },

    #[error("quantity not recorded: {0}")]
    NotRecorded(String),

    #[error("invalid configuration: {field}: {detail}")]
    Config { field: String, detail: String },

    #[error("{path}: {detail}")]
    Parse { path: PathBuf, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            detail: detail.into(),
        }
    }
}
