use std::path::PathBuf;

/// Errors produced by the approximation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty interval: lower end {c} is not below upper end {d}")]
    EmptyInterval { c: f64, d: f64 },

    #[error("need at least 2 samples inside [{c}, {d}], found {found}")]
    InsufficientSamples { c: f64, d: f64, found: usize },

    #[error("samples span [{first}, {last}] but must cover the interval [{c}, {d}]")]
    UncoveredInterval { c: f64, d: f64, first: f64, last: f64 },

    #[error("invalid samples: {0}")]
    InvalidSamples(String),

    #[error("denominator vanishes at t = {t} (value {value:e})")]
    ZeroDenominator { t: f64, value: f64 },

    #[error("invalid basis function `{spec}`: {reason}")]
    InvalidBasis { spec: String, reason: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("linear program is malformed: {0}")]
    MalformedLp(String),

    #[error("simplex exceeded {limit} pivots")]
    MaxIterations { limit: usize },

    #[error("feasibility LP failed: {0}")]
    LpFailure(Box<Error>),

    #[error("initial upper bound {upper} is not a feasible level")]
    NoFeasibleLevel { upper: f64 },

    #[error("bisection did not reach the target width within {limit} iterations")]
    IterationLimit { limit: usize },

    #[error("point lies outside the positive-denominator domain")]
    DomainSkip,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
