//! Fourier cosine basis over a box-bounded state space.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

const BOUNDS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierBasisConfig {
    pub order: usize,
    /// Coupled bases use every coefficient vector in `{0..order}^M`;
    /// decoupled ones use a constant plus per-dimension cosines.
    pub coupled: bool,
    pub input_bounds: Vec<(f64, f64)>,
}

/// A basis with its coefficient vectors precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBasis {
    cfg: FourierBasisConfig,
    coefficients: Vec<Vec<u32>>,
}

impl FourierBasis {
    pub fn new(cfg: FourierBasisConfig) -> Result<Self> {
        if cfg.order < 1 {
            return Err(Error::invalid("Fourier order must be at least 1"));
        }
        if cfg.input_bounds.is_empty() {
            return Err(Error::invalid(
                "Fourier basis needs at least one input dimension",
            ));
        }
        if cfg.input_bounds.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::invalid("Fourier bounds need low < high"));
        }
        let m = cfg.input_bounds.len();
        let n = cfg.order as u32;
        let coefficients = if cfg.coupled {
            let count = (cfg.order + 1)
                .checked_pow(m as u32)
                .ok_or_else(|| Error::invalid("coupled Fourier basis too large"))?;
            let mut all = Vec::with_capacity(count);
            let mut c = vec![0u32; m];
            loop {
                all.push(c.clone());
                // odometer increment, last dimension fastest
                let mut pos = m;
                loop {
                    if pos == 0 {
                        return Ok(FourierBasis {
                            cfg,
                            coefficients: all,
                        });
                    }
                    pos -= 1;
                    if c[pos] < n {
                        c[pos] += 1;
                        break;
                    }
                    c[pos] = 0;
                }
            }
        } else {
            let mut all = Vec::with_capacity(1 + cfg.order * m);
            all.push(vec![0; m]);
            for dim in 0..m {
                for k in 1..=n {
                    let mut c = vec![0; m];
                    c[dim] = k;
                    all.push(c);
                }
            }
            all
        };
        Ok(FourierBasis { cfg, coefficients })
    }

    pub fn config(&self) -> &FourierBasisConfig {
        &self.cfg
    }

    pub fn input_dim(&self) -> usize {
        self.cfg.input_bounds.len()
    }

    pub fn output_dim(&self) -> usize {
        self.coefficients.len()
    }

    /// Normalizes `state` into `[0,1]^M`, clamping overshoot up to `1e-9`.
    pub fn normalize(&self, state: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.input_dim(), state.len())?;
        state
            .iter()
            .zip(&self.cfg.input_bounds)
            .enumerate()
            .map(|(dim, (&x, &(low, high)))| {
                if !x.is_finite() || x < low - BOUNDS_SLACK || x > high + BOUNDS_SLACK {
                    return Err(Error::OutOfBounds {
                        dim,
                        value: x,
                        low,
                        high,
                    });
                }
                Ok(((x - low) / (high - low)).clamp(0.0, 1.0))
            })
            .collect()
    }

    pub fn features(&self, state: &[f64]) -> Result<Vec<f64>> {
        let s = self.normalize(state)?;
        Ok(self
            .coefficients
            .iter()
            .map(|c| {
                let arg: f64 = c.iter().zip(&s).map(|(&ci, &si)| ci as f64 * si).sum();
                libm::cos(PI * arg)
            })
            .collect())
    }
}

/// One-shot convenience wrapper around [`FourierBasis`].
pub fn fourier_features(state: &[f64], cfg: &FourierBasisConfig) -> Result<Vec<f64>> {
    FourierBasis::new(cfg.clone())?.features(state)
}
