//! Follow-the-Perturbed-Leader (FTPL) for m-set combinatorial semi-bandits.
//!
//! The learner picks `m` of `d` base-arms each round by minimising the
//! perturbed cumulative estimated loss `eta_t * L_hat - r`, where the
//! perturbation `r` is drawn i.i.d. from a Fréchet or Pareto law. Only the
//! losses of the chosen arms are observed, so the inverse selection
//! probabilities are estimated by geometric resampling ([`estimator`]).
//!
//! Module map:
//!
//! - [`config`], [`rng`], [`types`]: shared domain types, validation, seeded streams.
//! - [`perturbation`]: Fréchet / Pareto kernels.
//! - [`selection`]: linear-time top-m argmin and the rank statistic.
//! - [`estimator`]: geometric resampling (GR) and conditional GR (CGR).
//! - [`policy`]: the FTPL learner and its learning-rate schedule.
//! - [`environment`]: stochastic and switching Bernoulli environments.
//! - [`oracle`]: exact and Monte-Carlo selection probabilities for testing.

pub mod config;
pub mod environment;
pub mod error;
pub mod estimator;
pub mod oracle;
pub mod perturbation;
pub mod policy;
pub mod rng;
pub mod selection;
pub mod types;

pub use config::{validate_config, DistKind, EnvKind, EstimatorKind, ExperimentConfig};
pub use environment::Environment;
pub use error::{ConfigError, Error, Result};
pub use estimator::{Resampler, ResampleOutcome};
pub use perturbation::Perturbation;
pub use policy::{learning_rate, FtplPolicy};
pub use rng::{derive_trial_rng, RngStream};
pub use selection::{ranks, top_m_argmin, RankVector};
pub use types::{Action, CumulativeLossState, RoundRecord};
