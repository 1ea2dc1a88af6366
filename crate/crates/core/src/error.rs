use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// First violated invariant of an [`ExperimentConfig`](crate::ExperimentConfig).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("d must be >= 2 (got {0})")]
    DimensionTooSmall(usize),
    #[error("m must be >= 1")]
    EmptyAction,
    #[error("m must be < d (got m={m}, d={d})")]
    ActionTooLarge { m: usize, d: usize },
    #[error("horizon T must be >= 1")]
    EmptyHorizon,
    #[error("alpha must exceed 1 (got {0})")]
    AlphaTooSmall(f64),
    #[error("learning-rate constant c must be positive and finite (got {0})")]
    BadLearningRate(f64),
    #[error("gap must lie in (0, 1) (got {0})")]
    BadGap(f64),
    #[error("trials must be >= 1")]
    NoTrials,
    #[error("checkpoint_every must be >= 1")]
    BadCheckpoint,
    #[error("resample cap must be >= 1 when set")]
    BadCap,
    #[error("phase_len must be >= 1")]
    BadPhaseLen,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("uniform draw {0} outside [0, 1)")]
    Domain(f64),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("observation mismatch: {0}")]
    Observation(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("quadrature did not converge (achieved error estimate {achieved:e}, target {target:e})")]
    Quadrature { achieved: f64, target: f64 },
    #[error("cancelled")]
    Cancelled,
}
