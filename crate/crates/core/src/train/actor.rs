use alloc::vec;
use alloc::vec::Vec;

use super::SigmaMode;
use crate::gaussian::GaussianPolicyParams;
use crate::mlp::{Activation, Mlp};
use crate::{Error, Result, Rng};

/// Lower bound added to every learned standard deviation.
pub const SIGMA_FLOOR: f64 = 1e-6;

#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        libm::log1p(libm::exp(x))
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

fn softplus_inverse(y: f64) -> f64 {
    if y > 30.0 {
        y
    } else {
        libm::log(libm::expm1(y))
    }
}

/// Gaussian actor: `μ = tanh(net(φ(s))[..N])`, and in learned mode
/// `σ = softplus(net(φ(s))[N..]) + 1e-6`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianActor {
    net: Mlp,
    n_actions: usize,
    sigma: SigmaMode,
}

impl GaussianActor {
    pub fn new(
        n_features: usize,
        hidden: &[usize],
        n_actions: usize,
        sigma: SigmaMode,
        rng: &mut Rng,
    ) -> Result<Self> {
        sigma.validate(n_actions)?;
        let heads = if matches!(sigma, SigmaMode::Learned { .. }) {
            2 * n_actions
        } else {
            n_actions
        };
        let mut sizes = vec![n_features];
        sizes.extend_from_slice(hidden);
        sizes.push(heads);
        let mut net = Mlp::new(&sizes, Activation::Relu, Activation::Identity, rng)?;
        if let SigmaMode::Learned { init } = sigma {
            let last = net.layers_mut().last_mut().expect("non-empty");
            let b = softplus_inverse(init - SIGMA_FLOOR);
            for r in n_actions..heads {
                last.weights.row_mut(r).iter_mut().for_each(|w| *w = 0.0);
                last.bias[r] = b;
            }
        }
        Ok(GaussianActor {
            net,
            n_actions,
            sigma,
        })
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut Mlp {
        &mut self.net
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn sigma_mode(&self) -> &SigmaMode {
        &self.sigma
    }

    fn head(&self, out: &[f64]) -> Result<GaussianPolicyParams> {
        let n = self.n_actions;
        let mu = out[..n].iter().map(|&o| libm::tanh(o)).collect();
        let sigma = match &self.sigma {
            SigmaMode::Constant(s) => vec![*s; n],
            SigmaMode::PerEntry(s) => s.clone(),
            SigmaMode::Learned { .. } => out[n..]
                .iter()
                .map(|&o| softplus(o) + SIGMA_FLOOR)
                .collect(),
        };
        GaussianPolicyParams::new(mu, sigma)
    }

    pub fn policy(&self, features: &[f64]) -> Result<GaussianPolicyParams> {
        let out = self.net.predict(features)?;
        self.head(&out)
    }

    /// Deterministic action `μ(s)`.
    pub fn mean(&self, features: &[f64]) -> Result<Vec<f64>> {
        Ok(self.policy(features)?.mu().to_vec())
    }

    pub fn sample(&self, features: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
        Ok(self.policy(features)?.sample(rng))
    }

    /// `log π(â | s)` and its gradient with respect to the network parameters.
    pub fn log_prob_grad(
        &self,
        features: &[f64],
        a_hat: &[f64],
    ) -> Result<(f64, crate::mlp::MlpGrad)> {
        let (out, cache) = self.net.forward(features)?;
        let policy = self.head(&out)?;
        let lp = policy.log_prob_grad(a_hat)?;
        let n = self.n_actions;
        let mut upstream = vec![0.0; out.len()];
        for i in 0..n {
            let mu = policy.mu()[i];
            upstream[i] = lp.d_mu[i] * (1.0 - mu * mu);
        }
        if matches!(self.sigma, SigmaMode::Learned { .. }) {
            for i in 0..n {
                upstream[n + i] = lp.d_sigma[i] * sigmoid(out[n + i]);
            }
        }
        Ok((lp.log_prob, self.net.backward(&cache, &upstream)?))
    }

    /// `θ ← θ + α δ ∇θ log π(â | s)`.
    pub fn update(&mut self, features: &[f64], a_hat: &[f64], delta: f64, lr: f64) -> Result<()> {
        if !delta.is_finite() {
            return Err(Error::NonFinite("TD error"));
        }
        if delta == 0.0 || lr == 0.0 {
            return Ok(());
        }
        let (_, mut grad) = self.log_prob_grad(features, a_hat)?;
        grad.scale(-delta);
        self.net.sgd_step(&grad, lr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_round_trip() {
        for y in [1e-3, 0.25, 1.0, 5.0, 40.0] {
            assert!((softplus(softplus_inverse(y)) - y).abs() < 1e-9);
        }
    }

    #[test]
    fn learned_sigma_starts_at_init() {
        let mut rng = Rng::new(3);
        let actor =
            GaussianActor::new(4, &[8], 2, SigmaMode::Learned { init: 0.5 }, &mut rng).unwrap();
        let p = actor.policy(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        for s in p.sigma() {
            assert!((s - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn positive_delta_moves_mean_toward_sample() {
        let mut rng = Rng::new(1);
        let mut actor = GaussianActor::new(3, &[], 1, SigmaMode::Constant(0.5), &mut rng).unwrap();
        let x = [1.0, 0.5, -0.5];
        let mu = actor.mean(&x).unwrap()[0];
        let target = mu + 0.3;
        let mut down = actor.clone();
        actor.update(&x, &[target], 1.0, 1e-3).unwrap();
        assert!((target - actor.mean(&x).unwrap()[0]).abs() < (target - mu).abs());
        down.update(&x, &[target], -1.0, 1e-3).unwrap();
        assert!((target - down.mean(&x).unwrap()[0]).abs() > (target - mu).abs());
    }
}
