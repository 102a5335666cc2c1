//! Diagonal Gaussian policy head.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPolicyParams {
    mu: Vec<f64>,
    sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogProbGrad {
    pub log_prob: f64,
    pub d_mu: Vec<f64>,
    pub d_sigma: Vec<f64>,
}

impl GaussianPolicyParams {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        Error::check_dim(mu.len(), sigma.len())?;
        if sigma.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::invalid("sigma must be positive and finite"));
        }
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite("mu"));
        }
        Ok(GaussianPolicyParams { mu, sigma })
    }

    /// Same `sigma` for every entry.
    pub fn isotropic(mu: Vec<f64>, sigma: f64) -> Result<Self> {
        let n = mu.len();
        Self::new(mu, alloc::vec![sigma; n])
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        self.mu
            .iter()
            .zip(&self.sigma)
            .map(|(m, s)| m + s * rng.normal())
            .collect()
    }

    /// `log π(â)` and its gradient with respect to `mu` and `sigma`.
    pub fn log_prob_grad(&self, a_hat: &[f64]) -> Result<LogProbGrad> {
        Error::check_dim(self.mu.len(), a_hat.len())?;
        let half_log_2pi = 0.5 * libm::log(2.0 * PI);
        let mut log_prob = 0.0;
        let mut d_mu = Vec::with_capacity(a_hat.len());
        let mut d_sigma = Vec::with_capacity(a_hat.len());
        for ((&a, &m), &s) in a_hat.iter().zip(&self.mu).zip(&self.sigma) {
            let diff = a - m;
            let s2 = s * s;
            log_prob += -diff * diff / (2.0 * s2) - libm::log(s) - half_log_2pi;
            d_mu.push(diff / s2);
            d_sigma.push(diff * diff / (s2 * s) - 1.0 / s);
        }
        Ok(LogProbGrad {
            log_prob,
            d_mu,
            d_sigma,
        })
    }
}
