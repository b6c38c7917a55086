//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {dim}: {what}")]
    UnsupportedDimension { dim: usize, what: String },
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("zero functional")]
    ZeroFunctional,
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("point not on the body boundary (residual {0:.3e})")]
    NotOnBoundary(f64),
    #[error("no supporting functional found (boundary detection failure)")]
    NoSupportingFunctional,
    #[error("ray never exits the body's bounding region")]
    UnboundedRay,
    #[error("degenerate patch: {0}")]
    DegeneratePatch(String),
    #[error("gauge oracle inconsistency: {0}")]
    GaugeOracle(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("path is plane for the supplied functional (range {0:.3e})")]
    PlanePath(f64),
    #[error("no climb window found; the path is plane within tolerance")]
    NoClimbWindow,
    #[error("certificate construction failed: term `{term}` is nonpositive ({value:.6e})")]
    NonpositiveMinTerm { term: &'static str, value: f64 },
    #[error("decision failed: {0}")]
    Decision(String),
    #[error("grid too large: {required} cells exceed the cap of {cap}")]
    GridTooLarge { required: u128, cap: u64 },
    #[error("grid spacing mismatch: {0} vs {1}")]
    SpacingMismatch(f64, f64),
    #[error("unbounded raster descriptor: {0}")]
    UnboundedDescriptor(String),
    #[error("interval union blowup: {0} pieces exceed the cap")]
    IntervalBlowup(usize),
    #[error("invalid rational data: {0}")]
    InvalidRational(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
