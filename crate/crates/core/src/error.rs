use thiserror::Error;

/// Errors produced anywhere in the synthesis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is singular ({0})")]
    Singular(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate basis: rank {rank} < {expected} (sigma_min = {sigma_min:e})")]
    DegenerateBasis {
        rank: usize,
        expected: usize,
        sigma_min: f64,
    },

    #[error("element not in span of basis (residual {residual:e})")]
    NotInSpan { residual: f64 },

    #[error(
        "sample point search failed: best sigma_min {best_sigma_min:e} after {restarts} restarts"
    )]
    SamplePoints {
        best_sigma_min: f64,
        restarts: usize,
    },

    #[error("Wei-Norman breakdown at t = {time} (det = {det:e}, split order n = {n})")]
    Breakdown { time: f64, det: f64, n: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unrealizable stage {index}: best forward match {best_rms:e} above tolerance")]
    Unrealizable { index: usize, best_rms: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::Domain(_)
                | Error::Validation(_)
                | Error::Config(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::NotInSpan { .. }
        )
    }
}
