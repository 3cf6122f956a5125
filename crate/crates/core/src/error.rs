use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order must lie in (0, 1], got {0}")]
    InvalidOrder(f64),
    #[error("grid too small: axis needs at least 3 nodes, got {0}")]
    GridTooSmall(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid samples: non-finite value at node {0}")]
    InvalidSamples(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("chart mismatch")]
    ChartMismatch,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("top degree at desk scale: exterior derivative of a {0}-form is not provided")]
    TopDegree(usize),
    #[error("degenerate metric at node {node} (condition number {cond:.3e})")]
    DegenerateMetric { node: usize, cond: f64 },
    #[error("degenerate vertical metric at node {0}")]
    DegenerateVerticalMetric(usize),
    #[error("zero volume")]
    ZeroVolume,
    #[error("non-finite mass {0}")]
    NonFiniteMass(f64),
    #[error("tau must be positive, got {0}")]
    NonPositiveTau(f64),
    #[error("flow singularity at chi = {chi}: {reason}")]
    FlowSingularity { chi: f64, reason: String },
    #[error("chi = {0} outside recorded history")]
    OutOfHistory(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
