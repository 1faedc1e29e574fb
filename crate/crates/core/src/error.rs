use thiserror::Error;

/// Failures reported by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("backgrounds violate the shock ordering: b- + 2a- = {left_top} is not below b+ - 2a+ = {right_bottom}")]
    NotAShock { left_top: f64, right_bottom: f64 },
    #[error("coefficient a({n}) = {value} is not positive")]
    NonPositiveA { n: i64, value: f64 },
    #[error("boundary contamination at t = {t}: edge deviation {deviation:e} exceeds {tolerance:e}; enlarge the window")]
    BoundaryContamination { t: f64, deviation: f64, tolerance: f64 },
    #[error("integration became unstable at t = {t} (a({n}) = {value})")]
    Instability { t: f64, n: i64, value: f64 },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("root bracket failed: {0}")]
    Bracket(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("resonance status at {point} is indeterminate (|W| = {w_abs:e})")]
    IndeterminateResonance { point: &'static str, w_abs: f64 },
    #[error("branch inconsistency: {0}")]
    Branch(String),
    #[error("parameter outside its domain: {0}")]
    Domain(String),
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
