use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bandit policy has no arms")]
    NoArms,

    #[error("infeasible successive-rejects schedule: {arms} arms with a budget of {budget} pulls")]
    InfeasibleSchedule { arms: usize, budget: u64 },

    #[error("invalid search space: {0}")]
    InvalidSpace(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parent selection needs at least 2 candidates, got {0}")]
    PoolTooSmall(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("design space has {count} designs, above the enumeration limit of {limit}; sample instead")]
    EnumerationLimit { count: u128, limit: u128 },

    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
