//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid point: coordinate {index} has modulus {modulus} (must be < 1 - 1e-14)")]
    InvalidPoint { index: usize, modulus: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("truncation tail bound {tail:.3e} exceeds budget {budget:.3e}; increase the basis degree or move the evaluation point inward")]
    TailBound { tail: f64, budget: f64 },

    #[error("covering property violated: {property} ({detail})")]
    PropertyViolation { property: &'static str, detail: String },

    #[error(
        "uncovered-region sensitivity {sensitivity:.3e} is not below 10% of the reported error {value:.3e}; increase beta_max"
    )]
    CoverageSensitivity { sensitivity: f64, value: f64 },

    #[error("symbol not finite at quadrature node ({re}, {im})")]
    SymbolNotFinite { re: f64, im: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code the CLI maps this error to (2 = config, 3 = numeric).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
