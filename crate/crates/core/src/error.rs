use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a step driver needs at least one angle")]
    EmptyDriver,
    #[error("angle {index} is not finite ({value})")]
    NonFiniteAngle { index: usize, value: f64 },
    #[error("driver evaluated outside [0, 1] at x = {0}")]
    OutOfDomain(f64),
    #[error("refinement factor must be at least 1")]
    InvalidFactor,
    #[error("coefficient order must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("refusing {order} coefficients on {m} subintervals")]
    ResourceLimit { m: usize, order: usize },
    #[error("unknown functional `{0}`")]
    UnknownFunctional(String),
    #[error("objective is not finite ({value}) for driver with m = {m}")]
    NonFiniteObjective { m: usize, value: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("lambda must be non-negative, got {0}")]
    NegativeLambda(f64),
    #[error("tolerance must lie in (0, 1e-6], got {0}")]
    InvalidTolerance(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
