use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("degenerate region: I_n is empty for n = {n}, d = {d}")]
    DegenerateRegion { n: usize, d: f64 },
    #[error("degenerate two-point frame at ({x}, {y}): 1 - r^2 = {one_minus_r2:e}")]
    DegenerateFrame { x: f64, y: f64, one_minus_r2: f64 },
    #[error("degenerate variance: k_n vanishes at {0}")]
    DegenerateVariance(f64),
    #[error("tolerance {tol:e} not met within budget (error estimate {estimate:e})")]
    ToleranceNotMet { tol: f64, estimate: f64 },
    #[error("regions overlap: {0} and {1}")]
    OverlappingRegions(String, String),
    #[error("unknown column: {0}")]
    UnknownColumn(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("root isolation did not terminate: {0}")]
    IsolationFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
