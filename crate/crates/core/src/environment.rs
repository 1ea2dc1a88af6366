//! Bernoulli loss environments.
//!
//! Both environments are oblivious: the mean vector depends only on `t`.
//! Losses are drawn as `loss_i = 1[u_i < mu_{t,i}]` from `d` uniforms taken in
//! index order.

use rand::Rng;

use crate::config::{EnvKind, ExperimentConfig};
use crate::selection::top_m_argmin;
use crate::types::Action;

/// Growth factor of the switching phases.
pub const PHASE_GROWTH: f64 = 1.6;

/// i.i.d. Bernoulli losses: `(1 - gap) / 2` on the first `m` arms and
/// `(1 + gap) / 2` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticBernoulliEnv {
    means: Vec<f64>,
    optimal: Action,
}

impl StochasticBernoulliEnv {
    pub fn new(d: usize, m: usize, gap: f64) -> Self {
        assert!(m >= 1 && m < d, "need 1 <= m < d");
        assert!((0.0..1.0).contains(&gap), "gap must lie in [0, 1)");
        let means = (0..d)
            .map(|i| if i < m { (1.0 - gap) / 2.0 } else { (1.0 + gap) / 2.0 })
            .collect();
        Self { means, optimal: Action::from_sorted_unchecked((0..m).collect()) }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn optimal_set(&self) -> &Action {
        &self.optimal
    }
}

/// Stochastically constrained adversarial losses. Phase `p` has length
/// `ceil(phase_len * 1.6^p)`. In a low phase the optimal arms have mean 0 and
/// the rest `gap`; in a high phase they have `1 - gap` and the rest 1.
///
/// By default the optimal block is always arms `0..m` and only the levels
/// switch. With `swap_identities` the block `m..d` is optimal in odd phases.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingAdversarialEnv {
    d: usize,
    m: usize,
    gap: f64,
    phase_len: usize,
    swap_identities: bool,
    start_high: bool,
}

impl SwitchingAdversarialEnv {
    pub fn new(d: usize, m: usize, gap: f64, phase_len: usize) -> Self {
        assert!(m >= 1 && m < d, "need 1 <= m < d");
        assert!((0.0..1.0).contains(&gap), "gap must lie in [0, 1)");
        assert!(phase_len >= 1);
        Self { d, m, gap, phase_len, swap_identities: false, start_high: false }
    }

    pub fn with_swap_identities(mut self, on: bool) -> Self {
        self.swap_identities = on;
        self
    }

    pub fn with_start_high(mut self, on: bool) -> Self {
        self.start_high = on;
        self
    }

    /// Length of phase `p` (0-based).
    pub fn phase_length(&self, p: usize) -> usize {
        let raw = self.phase_len as f64 * PHASE_GROWTH.powi(p as i32);
        // Absorb representation error so exact products do not round up.
        (raw - 1e-9).ceil().max(1.0) as usize
    }

    /// `(phase index, first round of the phase)` containing round `t >= 1`.
    pub fn phase_at(&self, t: usize) -> (usize, usize) {
        let mut start = 1;
        let mut p = 0;
        loop {
            let len = self.phase_length(p);
            if t < start + len {
                return (p, start);
            }
            start += len;
            p += 1;
        }
    }

    fn phase_means(&self, p: usize, out: &mut [f64]) {
        let high = (p % 2 == 1) != self.start_high;
        let (good, bad) = if high { (1.0 - self.gap, 1.0) } else { (0.0, self.gap) };
        let block_b_optimal = self.swap_identities && p % 2 == 1;
        for (i, mu) in out.iter_mut().enumerate() {
            let in_block_a = i < self.m;
            *mu = if in_block_a != block_b_optimal { good } else { bad };
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Environment {
    Stochastic(StochasticBernoulliEnv),
    Switching(SwitchingAdversarialEnv),
}

/// Best fixed action over a horizon and its expected loss in each round.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparator {
    pub action: Action,
    /// `mu_t . a*` for `t = 1..=T` (index `t - 1`).
    pub per_round_loss: Vec<f64>,
}

impl Environment {
    pub fn make_stochastic(d: usize, m: usize, gap: f64) -> Self {
        Self::Stochastic(StochasticBernoulliEnv::new(d, m, gap))
    }

    pub fn make_switching(d: usize, m: usize, gap: f64, phase_len: usize) -> Self {
        Self::Switching(SwitchingAdversarialEnv::new(d, m, gap, phase_len))
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        match cfg.env_kind {
            EnvKind::StochasticBernoulli => Self::make_stochastic(cfg.d, cfg.m, cfg.gap),
            EnvKind::SwitchingAdversarial => Self::Switching(
                SwitchingAdversarialEnv::new(cfg.d, cfg.m, cfg.gap, cfg.phase_len)
                    .with_swap_identities(cfg.swap_identities)
                    .with_start_high(cfg.start_high),
            ),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Self::Stochastic(e) => e.means.len(),
            Self::Switching(e) => e.d,
        }
    }

    /// Writes the mean vector of round `t` into `out`.
    pub fn means_into(&self, t: usize, out: &mut [f64]) {
        assert!(t >= 1, "rounds are 1-based");
        match self {
            Self::Stochastic(e) => out.copy_from_slice(&e.means),
            Self::Switching(e) => e.phase_means(e.phase_at(t).0, out),
        }
    }

    pub fn means_at(&self, t: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.d()];
        self.means_into(t, &mut out);
        out
    }

    /// Samples the round-`t` loss vector into `out`.
    pub fn sample_losses<R: Rng + ?Sized>(&self, t: usize, rng: &mut R, means: &mut [f64], out: &mut [f64]) {
        self.means_into(t, means);
        for (l, &mu) in out.iter_mut().zip(means.iter()) {
            *l = if rng.gen::<f64>() < mu { 1.0 } else { 0.0 };
        }
    }

    pub fn loss_vector<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> Vec<f64> {
        let d = self.d();
        let mut means = vec![0.0; d];
        let mut out = vec![0.0; d];
        self.sample_losses(t, rng, &mut means, &mut out);
        out
    }

    /// The action minimising `sum_{t <= T} mu_t . a`, from the known schedule.
    pub fn optimal_fixed_action(&self, horizon: usize) -> Comparator {
        assert!(horizon >= 1);
        let d = self.d();
        let mut totals = vec![0.0; d];
        let mut means = vec![0.0; d];
        let action = match self {
            Self::Stochastic(e) => e.optimal.clone(),
            Self::Switching(e) => {
                let mut start = 1;
                let mut p = 0;
                while start <= horizon {
                    let len = e.phase_length(p).min(horizon + 1 - start);
                    e.phase_means(p, &mut means);
                    for (tot, mu) in totals.iter_mut().zip(&means) {
                        *tot += len as f64 * mu;
                    }
                    start += len;
                    p += 1;
                }
                top_m_argmin(&totals, e.m)
            }
        };
        let per_round_loss = (1..=horizon)
            .map(|t| {
                self.means_into(t, &mut means);
                action.indices().iter().map(|&i| means[i]).sum()
            })
            .collect();
        Comparator { action, per_round_loss }
    }

    /// `mu_t . a_t - mu_t . comparator`.
    pub fn pseudo_regret_increment(&self, t: usize, action: &Action, comparator: &Action) -> f64 {
        let means = self.means_at(t);
        regret_from_means(&means, action, comparator)
    }
}

pub(crate) fn regret_from_means(means: &[f64], action: &Action, comparator: &Action) -> f64 {
    let played: f64 = action.indices().iter().map(|&i| means[i]).sum();
    let best: f64 = comparator.indices().iter().map(|&i| means[i]).sum();
    played - best
}
