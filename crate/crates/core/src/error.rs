use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator needs 21 upper-triangle entries, got {0}")]
    UpperLength(usize),
    #[error("non-finite entry {0}")]
    NonFinite(f64),
    #[error("unknown basis tag {0:?}, expected \"wedge4\"")]
    UnknownBasis(String),
    #[error("matrix not symmetric at ({row}, {col}): difference {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("invalid cone parameters eta={eta}, mu={mu}: need mu - 1 >= eta >= 0 and mu > 1")]
    InvalidParams { eta: f64, mu: f64 },
    #[error("invalid frame octet: {0}")]
    InvalidFrame(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("membership is not monotone along R + a*I (bracket exceeded 2^60)")]
    NonMonotone,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("step size underflow at t = {t}: dt = {dt:e}")]
    StepUnderflow { t: f64, dt: f64 },
    #[error("sampler gave up after {tries} attempts: {reason}")]
    RetryExhausted { tries: usize, reason: String },
    #[error("bisection failed: {0}")]
    Bisection(String),
    #[error("cutoff self-check failed: {0}")]
    Cutoff(String),
}

pub type Result<T> = std::result::Result<T, Error>;
