//! Fréchet and Pareto perturbation laws with shape `alpha > 1`.
//!
//! Fréchet: `F(x) = exp(-x^-alpha)` on `x >= 0`.
//! Pareto:  `F(x) = 1 - x^-alpha` on `x >= 1`.
//!
//! Sampling is plain inverse transform on uniforms in `[0, 1)`, so no draw is
//! ever infinite.

use rand::Rng;

use crate::config::DistKind;
use crate::error::{ConfigError, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    kind: DistKind,
    alpha: f64,
}

impl Perturbation {
    pub fn new(kind: DistKind, alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(ConfigError::AlphaTooSmall(alpha).into());
        }
        Ok(Self { kind, alpha })
    }

    pub fn frechet(alpha: f64) -> Result<Self> {
        Self::new(DistKind::Frechet, alpha)
    }

    pub fn pareto(alpha: f64) -> Result<Self> {
        Self::new(DistKind::Pareto, alpha)
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Left endpoint of the support.
    pub fn nu(&self) -> f64 {
        match self.kind {
            DistKind::Frechet => 0.0,
            DistKind::Pareto => 1.0,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.kind {
            DistKind::Frechet => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-self.alpha)).exp()
                }
            }
            DistKind::Pareto => {
                if x <= 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-self.alpha)
                }
            }
        }
    }

    /// Upper tail `1 - F(x)`, accurate where `F(x)` is close to one.
    pub fn sf(&self, x: f64) -> f64 {
        match self.kind {
            DistKind::Frechet => {
                if x <= 0.0 {
                    1.0
                } else {
                    -(-x.powf(-self.alpha)).exp_m1()
                }
            }
            DistKind::Pareto => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(-self.alpha)
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let a = self.alpha;
        match self.kind {
            DistKind::Frechet => {
                if x <= 0.0 {
                    return 0.0;
                }
                let tail = x.powf(-a);
                // Underflows cleanly to 0 as x -> 0+.
                a * tail / x * (-tail).exp()
            }
            DistKind::Pareto => {
                if x < 1.0 {
                    0.0
                } else {
                    a * x.powf(-a - 1.0)
                }
            }
        }
    }

    /// Quantile function on `[0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain(u));
        }
        Ok(self.quantile(u))
    }

    #[inline]
    fn quantile(&self, u: f64) -> f64 {
        match self.kind {
            DistKind::Frechet => {
                if u == 0.0 {
                    0.0
                } else {
                    (-u.ln()).powf(-1.0 / self.alpha)
                }
            }
            DistKind::Pareto => (-(-u).ln_1p() / self.alpha).exp(),
        }
    }

    /// One draw.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }

    /// Fills `out` with i.i.d. draws, in index order.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for slot in out.iter_mut() {
            *slot = self.quantile(rng.gen::<f64>());
        }
    }

    pub fn sample_vector<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; d];
        self.sample_into(rng, &mut out);
        out
    }
}
