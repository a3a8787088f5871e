use thiserror::Error;

/// Error type shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(usize),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },

    #[error("symbol {symbol} has zero probability under the distribution")]
    SupportMismatch { symbol: usize },

    #[error("symbol {symbol} has zero probability under the reference distribution")]
    ZeroReferenceProb { symbol: usize },

    #[error("empty prefix: the empirical estimate needs at least one symbol")]
    EmptyPrefix,

    #[error("delta {delta} must be smaller than the minimum positive probability {p_min}")]
    DeltaTooLarge { delta: f64, p_min: f64 },

    #[error("empty lambda window: lo {lo} >= hi {hi} (warm-up too short or distributions too close)")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("lambda {lambda} outside the valid window ({lo}, {hi})")]
    LambdaOutsideWindow { lambda: f64, lo: f64, hi: f64 },

    #[error("threshold must be positive (gamma > 1), got {0} bits")]
    InvalidThreshold(f64),

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("enumeration too large: K^n = {states} exceeds 2^24")]
    TooLarge { states: u128 },

    #[error("kappa {kappa} infeasible: lambda window requires {required} < {available}")]
    InfeasibleKappa {
        kappa: f64,
        required: f64,
        available: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}
