//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building or applying a filter.
///
/// Variants carry enough context to name the pipeline stage and, for
/// validation failures, the exact inequality that failed.
#[derive(Debug, Error)]
pub enum SfwError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("data validation failed: {0}")]
    ValidationFailed(String),

    #[error("spectrum not strictly positive at omega = {omega} rad/s (value {value})")]
    NonPositiveSpectrum { omega: f64, value: f64 },

    #[error("transformed observation spectrum has non-positive infimum {inf}; check the declared asymptotics")]
    BadTransform { inf: f64 },

    #[error("error variance diverges: {0}")]
    DivergentIntegral(String),

    #[error("quadrature produced an imaginary residue {residue:.3e} (tolerance {tol:.3e}); input spectrum is not symmetric")]
    AsymmetricSpectrum { residue: f64, tol: f64 },

    #[error("Toeplitz matrix is not positive definite (failed at leading minor {order}); upstream spectrum may dip non-positive")]
    NotPositiveDefinite { order: usize },

    #[error("bound formula not representable: {0}")]
    ExponentDomain(String),

    #[error("FIR realization leaks {fraction:.3e} of its energy into negative time (limit {limit:.1e}); increase the grid or precondition the data")]
    LeakageTooHigh { fraction: f64, limit: f64 },

    #[error("sample rate mismatch: filter expects dt = {expected} s, series has dt = {actual} s")]
    RateMismatch { expected: f64, actual: f64 },

    #[error("time series too short: need at least {need} samples, got {got}")]
    TooShort { need: usize, got: usize },

    #[error("series length/rate mismatch: {0}")]
    SeriesMismatch(String),

    #[error("fitting band too narrow: {0}")]
    InsufficientBand(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SfwError>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Format(String),
}

impl SfwError {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn at_stage(self, stage: &'static str) -> Self {
        SfwError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
