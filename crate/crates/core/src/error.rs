use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown class `{name}`; available classes: {available}")]
    UnknownClass { name: String, available: String },

    #[error("negative weight at j={0}")]
    NegativeWeight(usize),

    #[error("no positive weight")]
    NoPositiveWeight,

    #[error("empty weight list")]
    EmptyWeights,

    #[error("missing rho")]
    MissingRho,

    #[error("rho must be positive and finite, got {0}")]
    InvalidRho(String),

    #[error("class config must give exactly one of `weights` or `formula`")]
    AmbiguousWeights,

    #[error("invalid class config: {0}")]
    Config(String),

    #[error("cannot parse `{0}` as a number")]
    Parse(String),

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("range N={range} is below n0={n0}")]
    RangeBelowStart { range: usize, n0: usize },

    #[error("empty support: the class has no structures of order {n}")]
    EmptySupport { n: usize },

    #[error("non-finite value at n={n}")]
    NonFinite { n: usize },

    #[error("table size {requested} exceeds the limit {limit}")]
    TooLarge { requested: usize, limit: usize },

    #[error("n={n} exceeds the enumeration cap {cap}")]
    AboveCap { n: usize, cap: usize },

    #[error("additive function `{0}` is float-valued and has no exact evaluation")]
    NotExact(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("all weights are zero; no tilt exists")]
    NoTilt,

    #[error("rejection limit {limit} exceeded; observed acceptance rate {rate:e}")]
    RejectionLimit { limit: u64, rate: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
