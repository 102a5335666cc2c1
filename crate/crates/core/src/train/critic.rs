use alloc::vec;
use alloc::vec::Vec;

use crate::loss::huber_loss_grad;
use crate::mapping::{ActionSpaceSpec, QOracle};
use crate::mlp::{Activation, Mlp};
use crate::{Error, Result, Rng};

/// `Q(s, a)` network over state features concatenated with the action
/// rescaled to `[0, 1]` per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Critic {
    net: Mlp,
    space: ActionSpaceSpec,
    n_features: usize,
}

impl Critic {
    pub fn new(
        n_features: usize,
        hidden: &[usize],
        space: ActionSpaceSpec,
        rng: &mut Rng,
    ) -> Result<Self> {
        let mut sizes = vec![n_features + space.n_dims()];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let net = Mlp::new(&sizes, Activation::Relu, Activation::Identity, rng)?;
        Ok(Critic {
            net,
            space,
            n_features,
        })
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut Mlp {
        &mut self.net
    }

    pub fn space(&self) -> &ActionSpaceSpec {
        &self.space
    }

    fn input(&self, features: &[f64], action: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.n_features, features.len())?;
        Error::check_dim(self.space.n_dims(), action.len())?;
        let mut x = Vec::with_capacity(self.net.input_dim());
        x.extend_from_slice(features);
        x.extend(self.space.normalize(action));
        Ok(x)
    }

    pub fn q(&self, features: &[f64], action: &[f64]) -> Result<f64> {
        Ok(self.net.predict(&self.input(features, action)?)?[0])
    }

    /// One semi-gradient step on `Huber(Q(s, a), target)`; returns the loss.
    pub fn update(
        &mut self,
        features: &[f64],
        action: &[f64],
        target: f64,
        huber_delta: f64,
        lr: f64,
    ) -> Result<f64> {
        if !target.is_finite() {
            return Err(Error::NonFinite("critic target"));
        }
        let (out, cache) = self.net.forward(&self.input(features, action)?)?;
        let (loss, g) = huber_loss_grad(out[0], target, huber_delta);
        if g == 0.0 || lr == 0.0 {
            return Ok(loss);
        }
        let grad = self.net.backward(&cache, &[g])?;
        self.net.sgd_step(&grad, lr)?;
        Ok(loss)
    }
}

impl QOracle for Critic {
    fn q_values(&self, state: &[f64], actions: &[Vec<f64>]) -> Result<Vec<f64>> {
        Error::check_dim(self.n_features, state.len())?;
        let prefix = self.net.first_layer_partial(state, 0);
        let mut z = Vec::with_capacity(prefix.len());
        let mut buf = Vec::with_capacity(prefix.len());
        let mut norm = Vec::with_capacity(self.space.n_dims());
        let mut out = Vec::with_capacity(actions.len());
        for a in actions {
            Error::check_dim(self.space.n_dims(), a.len())?;
            norm.clear();
            norm.extend(
                a.iter().enumerate().map(|(i, &v)| {
                    (v - self.space.low(i)) / (self.space.high(i) - self.space.low(i))
                }),
            );
            z.clear();
            z.extend_from_slice(&prefix);
            self.net
                .add_first_layer_partial(&norm, self.n_features, &mut z);
            self.net.finish_in_place(&mut z, &mut buf);
            out.push(z[0]);
        }
        Ok(out)
    }
}
