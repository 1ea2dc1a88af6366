//! The FTPL learner.

use rand::Rng;

use crate::config::{EstimatorKind, ExperimentConfig};
use crate::error::Result;
use crate::estimator::{loss_estimate, ResampleOutcome, Resampler};
use crate::perturbation::Perturbation;
use crate::selection::{ranks, TopMSelector};
use crate::types::{Action, CumulativeLossState};

/// `eta_t = c / sqrt(t) * m^(1/2 - 1/alpha) * d^(1/alpha - 1/2)`.
///
/// At `alpha = 2` the dimension factors cancel and this is `c / sqrt(t)`.
pub fn learning_rate(t: usize, c: f64, m: usize, d: usize, alpha: f64) -> f64 {
    assert!(t >= 1, "rounds are 1-based");
    let shape = 0.5 - 1.0 / alpha;
    c / (t as f64).sqrt() * (m as f64).powf(shape) * (d as f64).powf(-shape)
}

/// Effort counters from one [`FtplPolicy::update`].
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateSummary {
    pub eta: f64,
    pub outcome: ResampleOutcome,
}

#[derive(Debug, Clone)]
pub struct FtplPolicy {
    state: CumulativeLossState,
    dist: Perturbation,
    lr_constant: f64,
    estimator: EstimatorKind,
    m: usize,
    cap: Option<u64>,
    resampler: Resampler,
    selector: TopMSelector,
    scores: Vec<f64>,
}

impl FtplPolicy {
    pub fn new(d: usize, m: usize, dist: Perturbation, lr_constant: f64, estimator: EstimatorKind) -> Self {
        assert!(m >= 1 && m <= d, "need 1 <= m <= d");
        Self {
            state: CumulativeLossState::new(d),
            dist,
            lr_constant,
            estimator,
            m,
            cap: None,
            resampler: Resampler::new(d),
            selector: TopMSelector::with_capacity(d),
            scores: vec![0.0; d],
        }
    }

    /// Policy for a validated config.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let dist = Perturbation::new(cfg.dist_kind, cfg.alpha)?;
        Ok(Self::new(cfg.d, cfg.m, dist, cfg.lr_constant, cfg.estimator_kind).with_cap(cfg.resample_cap))
    }

    pub fn with_cap(mut self, cap: Option<u64>) -> Self {
        self.cap = cap;
        self
    }

    /// Replaces the cumulative-loss state, e.g. to freeze `L_hat` in experiments.
    pub fn with_state(mut self, state: CumulativeLossState) -> Self {
        assert_eq!(state.d(), self.state.d());
        self.state = state;
        self
    }

    pub fn state(&self) -> &CumulativeLossState {
        &self.state
    }

    pub fn d(&self) -> usize {
        self.state.d()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dist(&self) -> &Perturbation {
        &self.dist
    }

    pub fn estimator(&self) -> EstimatorKind {
        self.estimator
    }

    /// Learning rate of the current round; shared by selection and update.
    pub fn eta(&self) -> f64 {
        learning_rate(self.state.round(), self.lr_constant, self.m, self.d(), self.dist.alpha())
    }

    /// Draws `r_t` and plays `argmin_a a . (eta_t L_hat_t - r_t)`. The
    /// perturbation is returned for telemetry only.
    pub fn select_action<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (Action, Vec<f64>) {
        let eta = self.eta();
        let r = self.dist.sample_vector(self.d(), rng);
        for ((s, &l), &p) in self.scores.iter_mut().zip(self.state.l_hat()).zip(&r) {
            *s = eta * l - p;
        }
        self.selector.select(&self.scores, self.m);
        (Action::from_sorted_unchecked(self.selector.members(self.m)), r)
    }

    /// Estimates inverse weights at the current `eta_t` and `L_hat_t`, adds the
    /// importance-weighted loss into `L_hat` and advances to round `t + 1`.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        action: &Action,
        observed: &[(usize, f64)],
        rng: &mut R,
    ) -> Result<UpdateSummary> {
        let eta = self.eta();
        let outcome = match self.estimator {
            EstimatorKind::Gr => self.resampler.gr(action, &self.state, eta, &self.dist, rng, self.cap)?,
            EstimatorKind::Cgr => {
                let sigma = ranks(self.state.l_hat());
                self.resampler.cgr(action, &self.state, &sigma, eta, &self.dist, rng, self.cap)?
            }
        };
        let estimate = loss_estimate(action, observed, &outcome)?;
        self.state.advance(&estimate);
        Ok(UpdateSummary { eta, outcome })
    }
}
