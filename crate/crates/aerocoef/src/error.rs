//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {msg}")]
    Csv { path: PathBuf, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("schema error in {file} row {row}: {msg}")]
    Schema { file: String, row: usize, msg: String },

    #[error("altitude {0} m outside the supported atmosphere range")]
    AltitudeOutOfRange(f64),

    #[error("altitude {0} m outside the engine parameter domain")]
    PiecewiseDomain(f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("specific fuel consumption is not positive ({0}) — coefficient formulas undefined")]
    NonPositiveSfc(f64),

    #[error("dynamic pressure term rho*V^2*S is not positive")]
    NonPositiveDynamicPressure,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("degenerate design matrix: rank {rank} < {cols} columns")]
    DegenerateDesign { rank: usize, cols: usize },

    #[error("relative bound undefined: mean coefficient {mean} does not exceed physical error bound {r}")]
    RelativeBoundUndefined { mean: f64, r: f64 },

    #[error("physical error level unavailable for phase `{0}`; bounds cannot be computed")]
    BoundUnavailable(String),

    #[error("trim failed at t = {t} s: {msg}")]
    TrimFailure { t: f64, msg: String },

    #[error("disturbances overlap at t = {0} s")]
    OverlappingDisturbances(f64),

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    FeatureDim { expected: usize, got: usize },

    #[error("unknown model family `{0}`")]
    UnknownFamily(String),

    #[error("model file {path} is not a valid estimator: {msg}")]
    ModelFormat { path: PathBuf, msg: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
