use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("time step {t} outside stored range 0..={t_max}")]
    TimeRange { t: usize, t_max: usize },

    #[error("field index {0} is not in 1..=4")]
    FieldIndex(usize),

    #[error("sample has no accumulated pairs")]
    EmptySample,

    #[error("slice t={t} of field {i} has zero norm")]
    ZeroNorm { t: usize, i: usize },

    #[error("field shapes differ: {0} vs {1} time steps")]
    ShapeMismatch(usize, usize),

    #[error("enumerating {steps} steps exceeds the guard of {guard}")]
    EnumerationGuard { steps: usize, guard: usize },

    #[error("malformed entwined pair: {0}")]
    MalformedPair(String),

    #[error("slope fit needs at least 3 points with positive error, got {0}")]
    TooFewPoints(usize),

    #[error("grid of {0} points is too small for central differences")]
    GridTooSmall(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
