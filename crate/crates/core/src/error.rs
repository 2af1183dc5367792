use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("step probability at level {level} is {value}, expected 0 < p <= 1/2")]
    InvalidProbability { level: i64, value: f64 },

    #[error("declared lower bound omega = {omega} is not a valid bound (smallest p is {min})")]
    OmegaViolated { omega: f64, min: f64 },

    #[error("profile has no values")]
    EmptyProfile,

    #[error("table tails differ (p+ = {pos}, p- = {neg}); no common averaging limit")]
    AsymmetricTails { pos: f64, neg: f64 },

    #[error("one-sided averages disagree at n = {n}: {upper} upward vs {lower} downward")]
    SidesDisagree { n: usize, upper: f64, lower: f64 },

    #[error("gamma = {gamma} but the return asymptotics need gamma > 1")]
    GammaNotAboveOne { gamma: f64 },

    #[error("level cap {cap} dropped {loss:e} probability mass; rerun with a larger --level-cap")]
    CapTooSmall { cap: usize, loss: f64 },

    #[error("path enumeration limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("site ({0}, {1}) was never visited")]
    InsufficientVisits(i64, i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed profile config: {0}")]
    Config(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
