use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("position {position} is outside 1..={n}")]
    PositionOutOfRange { position: usize, n: usize },

    /// Indices are 1-based.
    #[error("matrix is not antisymmetric at entry ({i}, {j})")]
    NotAntisymmetric { i: usize, j: usize },

    #[error("n = {n} exceeds the limit {limit}")]
    LimitExceeded { n: usize, limit: usize },

    #[error("statistic has zero variance")]
    ZeroVariance,

    #[error("matrix entries must be integers for this operation")]
    NonIntegerEntries,

    #[error("no built-in bijection for a custom statistic")]
    NoBuiltinBijection,

    #[error("element {0} is not in the set")]
    NotInSet(usize),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid number of trials: {0} (need at least 2)")]
    InvalidTrials(u64),

    #[error("input is not finite")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("distribution is not normalized (total mass {0})")]
    Unnormalized(f64),

    #[error("invalid bound ingredients: {0}")]
    InvalidIngredients(String),

    #[error("integer overflow: {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
