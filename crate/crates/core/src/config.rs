//! Experiment configuration and its validation.

use std::fmt;
use std::str::FromStr;

use crate::error::ConfigError;

/// Perturbation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistKind {
    Frechet,
    Pareto,
}

/// Inverse-weight estimator used by the policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Geometric resampling.
    Gr,
    /// Conditional geometric resampling.
    Cgr,
}

/// Loss environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvKind {
    StochasticBernoulli,
    SwitchingAdversarial,
}

macro_rules! impl_kind_text {
    ($ty:ty, $( $variant:path => $name:literal ),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self {
                    $( $variant => f.write_str($name), )+
                }
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.to_ascii_lowercase().as_str() {
                    $( $name => Ok($variant), )+
                    other => Err(format!("unknown value '{other}'")),
                }
            }
        }
    };
}

impl_kind_text!(DistKind, DistKind::Frechet => "frechet", DistKind::Pareto => "pareto");
impl_kind_text!(EstimatorKind, EstimatorKind::Gr => "gr", EstimatorKind::Cgr => "cgr");
impl_kind_text!(
    EnvKind,
    EnvKind::StochasticBernoulli => "stochastic",
    EnvKind::SwitchingAdversarial => "switching",
);

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    pub m: usize,
    pub horizon: usize,
    pub alpha: f64,
    pub dist_kind: DistKind,
    pub estimator_kind: EstimatorKind,
    /// Constant `c` of the learning-rate schedule.
    pub lr_constant: f64,
    pub env_kind: EnvKind,
    pub gap: f64,
    pub trials: usize,
    pub master_seed: u64,
    /// Optional bound on outer resampling iterations per round. `None` is the
    /// untruncated estimator.
    pub resample_cap: Option<u64>,
    pub checkpoint_every: usize,
    /// Length of the first phase of the switching environment.
    pub phase_len: usize,
    /// Switching environment: swap which arm block is optimal each phase
    /// instead of shifting the mean levels on fixed blocks.
    pub swap_identities: bool,
    /// Switching environment: start in the high `(1 - gap, 1)` regime.
    pub start_high: bool,
}

impl Default for ExperimentConfig {
    /// The stochastic `m = 3, d = 16` setting with `eta_t = 1/sqrt(t)`.
    fn default() -> Self {
        Self {
            d: 16,
            m: 3,
            horizon: 10_000,
            alpha: 2.0,
            dist_kind: DistKind::Frechet,
            estimator_kind: EstimatorKind::Cgr,
            lr_constant: 1.0,
            env_kind: EnvKind::StochasticBernoulli,
            gap: 0.125,
            trials: 100,
            master_seed: 42,
            resample_cap: None,
            checkpoint_every: 10,
            phase_len: 10,
            swap_identities: false,
            start_high: false,
        }
    }
}

/// Returns `cfg` unchanged if every invariant holds, otherwise the first
/// violated one.
pub fn validate_config(cfg: ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
    if cfg.d < 2 {
        return Err(ConfigError::DimensionTooSmall(cfg.d));
    }
    if cfg.m == 0 {
        return Err(ConfigError::EmptyAction);
    }
    if cfg.m >= cfg.d {
        return Err(ConfigError::ActionTooLarge { m: cfg.m, d: cfg.d });
    }
    if cfg.horizon == 0 {
        return Err(ConfigError::EmptyHorizon);
    }
    // NaN fails this comparison too.
    if !(cfg.alpha > 1.0 && cfg.alpha.is_finite()) {
        return Err(ConfigError::AlphaTooSmall(cfg.alpha));
    }
    if !(cfg.lr_constant > 0.0 && cfg.lr_constant.is_finite()) {
        return Err(ConfigError::BadLearningRate(cfg.lr_constant));
    }
    if !(cfg.gap > 0.0 && cfg.gap < 1.0) {
        return Err(ConfigError::BadGap(cfg.gap));
    }
    if cfg.trials == 0 {
        return Err(ConfigError::NoTrials);
    }
    if cfg.checkpoint_every == 0 {
        return Err(ConfigError::BadCheckpoint);
    }
    if cfg.resample_cap == Some(0) {
        return Err(ConfigError::BadCap);
    }
    if cfg.phase_len == 0 {
        return Err(ConfigError::BadPhaseLen);
    }
    Ok(cfg)
}
