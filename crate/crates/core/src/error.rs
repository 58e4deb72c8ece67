use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,

    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),

    #[error("lag {lag} too large for series of length {n}: need n - lag >= 2")]
    LagTooLarge { lag: usize, n: usize },

    #[error("degenerate series: {0}")]
    DegenerateSeries(&'static str),

    #[error("series of length {n} too short: {needed}")]
    InsufficientData { n: usize, needed: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("objective is not finite at the starting point")]
    NonFiniteObjective,

    #[error("root finder did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("model is not causal (AR polynomial has a root on or inside the unit circle)")]
    NotCausal,

    #[error("model is not invertible (MA polynomial has a root on or inside the unit circle)")]
    NotInvertible,

    #[error("|phi| must exceed 1 for the non-causal generator, got {0}")]
    NotNoncausal(f64),

    #[error("c-coefficient expansion only implemented for GARCH(1,1), got ({p},{q})")]
    UnsupportedOrder { p: usize, q: usize },

    #[error("invalid GARCH model: {}", .0.join("; "))]
    InvalidModel(Vec<String>),

    #[error("fit diverged: {0}")]
    FitDiverged(String),

    #[error("bootstrap dropped {dropped} of {total} replicates (limit 5%)")]
    DropRateExceeded { dropped: usize, total: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
