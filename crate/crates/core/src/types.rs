use crate::error::{Error, Result};

/// A size-`m` subset of base-arms `0..d`, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    indices: Vec<usize>,
}

impl Action {
    /// Builds an action from arbitrary-order indices, checking they are
    /// distinct, in range and exactly `m` of them.
    pub fn new(mut indices: Vec<usize>, m: usize, d: usize) -> Result<Self> {
        if indices.len() != m {
            return Err(Error::InvalidAction(format!("expected {m} arms, got {}", indices.len())));
        }
        indices.sort_unstable();
        if let Some(&bad) = indices.iter().find(|&&i| i >= d) {
            return Err(Error::InvalidAction(format!("arm {bad} out of range for d={d}")));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidAction("duplicate arm".into()));
        }
        Ok(Self { indices })
    }

    /// Caller guarantees the indices are sorted and distinct.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.indices.binary_search(&arm).is_ok()
    }

    /// 0/1 indicator vector of length `d`.
    pub fn to_indicator(&self, d: usize) -> Vec<u8> {
        let mut out = vec![0; d];
        for &i in &self.indices {
            out[i] = 1;
        }
        out
    }
}

/// Cumulative estimated losses `L_hat_t` and the current round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeLossState {
    l_hat: Vec<f64>,
    t: usize,
}

impl CumulativeLossState {
    /// Round 1 with all-zero cumulative losses.
    pub fn new(d: usize) -> Self {
        Self { l_hat: vec![0.0; d], t: 1 }
    }

    /// Arbitrary state, e.g. a frozen `L_hat` for estimator experiments.
    pub fn from_losses(l_hat: Vec<f64>, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidQuery("round index must be >= 1".into()));
        }
        if l_hat.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidQuery("cumulative losses must be finite and non-negative".into()));
        }
        Ok(Self { l_hat, t })
    }

    pub fn l_hat(&self) -> &[f64] {
        &self.l_hat
    }

    pub fn round(&self) -> usize {
        self.t
    }

    pub fn d(&self) -> usize {
        self.l_hat.len()
    }

    /// Adds a sparse estimate and moves to the next round.
    pub(crate) fn advance(&mut self, estimate: &[(usize, f64)]) {
        for &(i, v) in estimate {
            debug_assert!(v >= 0.0 && v.is_finite());
            self.l_hat[i] += v;
        }
        self.t += 1;
    }
}

/// Per-checkpoint telemetry of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub trial: usize,
    pub t: usize,
    pub cum_pseudo_regret: f64,
    /// Selected-arm resamples summed over the rounds since the previous checkpoint.
    pub resamples: u64,
    /// Action selection plus estimation time over the same window.
    pub elapsed_ns: u64,
}
