use thiserror::Error;

/// Errors raised by game construction, profile validation and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    /// A profile, logit vector or tensor does not match the game's dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A player index, action index or generator parameter is out of range.
    #[error("out of range: {0}")]
    Range(String),

    /// The requested game would exceed the dense tensor size limit.
    #[error("capacity exceeded: {entries} payoff entries requested, limit is {limit}")]
    Capacity { entries: u128, limit: u128 },

    /// A payoff or probability is NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A probability vector is negative or does not sum to one.
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
