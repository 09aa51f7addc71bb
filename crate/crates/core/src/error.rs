use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigenvalue table too short: need length {required}, have {available}")]
    InsufficientTable { required: usize, available: usize },

    #[error("q-expansion truncated too early: need N >= {required}, have {available}")]
    InsufficientTruncation { required: usize, available: usize },

    #[error("unsupported weight {0}")]
    UnsupportedWeight(i64),

    #[error("could not separate Hecke eigenspaces in weight {k}: {detail}")]
    EigenspaceSeparation { k: u32, detail: String },

    #[error(
        "L(1, sym^2 f) routes disagree beyond {threshold:e}: norm-identity {norm_identity}, \
         smoothed-series {smoothed_series}, rankin-slope {rankin_slope}"
    )]
    RouteDisagreement {
        threshold: f64,
        norm_identity: f64,
        smoothed_series: f64,
        rankin_slope: f64,
    },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
