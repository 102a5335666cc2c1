//! Fully connected feed-forward networks with hand-written backpropagation.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{axpy, dot, Mat64};
use crate::{Error, Result, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => libm::tanh(x),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the pre-activation `z`.
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = libm::tanh(z);
                1.0 - t * t
            }
            Activation::Identity => 1.0,
        }
    }
}

/// One affine map `y = W x + b`, `W` is `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Mat64,
    pub bias: Vec<f64>,
}

impl Layer {
    fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Layer {
            weights: Mat64::zeros(fan_out, fan_in),
            bias: vec![0.0; fan_out],
        }
    }

    pub fn fan_in(&self) -> usize {
        self.weights.cols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.rows()
    }
}

/// Network parameters plus activation choice.
///
/// `layer_sizes = [input, hidden.., output]`; with no hidden sizes the network
/// is a single affine map ("shallow").
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<Layer>,
    hidden: Activation,
    output: Activation,
}

/// Values kept from a forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
}

/// Gradient with the same shape as an [`Mlp`]'s parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrad {
    pub layers: Vec<Layer>,
}

impl MlpGrad {
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.is_finite() && l.bias.iter().all(|b| b.is_finite()))
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weights
                .as_mut_slice()
                .iter_mut()
                .for_each(|w| *w *= factor);
            l.bias.iter_mut().for_each(|b| *b *= factor);
        }
    }
}

impl Mlp {
    /// Uniform initialization in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn new(
        layer_sizes: &[usize],
        hidden: Activation,
        output: Activation,
        rng: &mut Rng,
    ) -> Result<Self> {
        let mut net = Mlp::zeros(layer_sizes, hidden, output)?;
        for layer in &mut net.layers {
            let bound = 1.0 / libm::sqrt(layer.fan_in() as f64);
            for w in layer.weights.as_mut_slice() {
                *w = rng.uniform_range(-bound, bound);
            }
            for b in &mut layer.bias {
                *b = rng.uniform_range(-bound, bound);
            }
        }
        Ok(net)
    }

    pub fn zeros(layer_sizes: &[usize], hidden: Activation, output: Activation) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::invalid(
                "an MLP needs at least input and output sizes",
            ));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::invalid("layer sizes must be positive"));
        }
        let layers = layer_sizes
            .windows(2)
            .map(|w| Layer::zeros(w[0], w[1]))
            .collect();
        Ok(Mlp {
            layers,
            hidden,
            output,
        })
    }

    /// Builds a network from explicit layers, checking that shapes chain.
    pub fn from_layers(layers: Vec<Layer>, hidden: Activation, output: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("no layers"));
        }
        for l in &layers {
            Error::check_dim(l.fan_out(), l.bias.len())?;
        }
        for w in layers.windows(2) {
            Error::check_dim(w[0].fan_out(), w[1].fan_in())?;
        }
        Ok(Mlp {
            layers,
            hidden,
            output,
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.input_dim()];
        sizes.extend(self.layers.iter().map(Layer::fan_out));
        sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].fan_out()
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden
    }

    pub fn output_activation(&self) -> Activation {
        self.output
    }

    #[inline]
    fn activation_of(&self, layer: usize) -> Activation {
        if layer + 1 == self.layers.len() {
            self.output
        } else {
            self.hidden
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        Error::check_dim(self.input_dim(), x.len())?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut current = x.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.bias.clone();
            for (zi, row) in z.iter_mut().zip(layer.weights.iter_rows()) {
                *zi += dot(row, &current);
            }
            let act = self.activation_of(i);
            let next: Vec<f64> = z.iter().map(|&v| act.apply(v)).collect();
            inputs.push(current);
            pre.push(z);
            current = next;
        }
        Ok((current, ForwardCache { inputs, pre }))
    }

    /// Forward pass without keeping a cache.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.input_dim(), x.len())?;
        let first = self.first_layer_partial(x, 0);
        Ok(self.finish_from_first_pre(first))
    }

    /// `W[:, offset..offset+part.len()] · part`, plus the bias when `offset == 0`.
    ///
    /// Splitting the first layer lets callers that score many inputs sharing a
    /// common prefix (a fixed state with varying actions) compute the prefix
    /// contribution once.
    pub fn first_layer_partial(&self, part: &[f64], offset: usize) -> Vec<f64> {
        let layer = &self.layers[0];
        debug_assert!(offset + part.len() <= layer.fan_in());
        let mut z = if offset == 0 {
            layer.bias.clone()
        } else {
            vec![0.0; layer.fan_out()]
        };
        for (zi, row) in z.iter_mut().zip(layer.weights.iter_rows()) {
            *zi += dot(&row[offset..offset + part.len()], part);
        }
        z
    }

    /// Completes a forward pass from the first layer's pre-activation.
    pub fn finish_from_first_pre(&self, mut z: Vec<f64>) -> Vec<f64> {
        let mut buf = Vec::new();
        self.finish_in_place(&mut z, &mut buf);
        z
    }

    /// [`Mlp::finish_from_first_pre`] writing the output into `z`, with `buf`
    /// as scratch space so repeated calls do not allocate.
    pub fn finish_in_place(&self, z: &mut Vec<f64>, buf: &mut Vec<f64>) {
        for i in 0..self.layers.len() {
            let act = self.activation_of(i);
            if act != Activation::Identity {
                z.iter_mut().for_each(|v| *v = act.apply(*v));
            }
            if i + 1 == self.layers.len() {
                break;
            }
            let layer = &self.layers[i + 1];
            buf.clear();
            buf.extend_from_slice(&layer.bias);
            for (ni, row) in buf.iter_mut().zip(layer.weights.iter_rows()) {
                *ni += dot(row, z);
            }
            core::mem::swap(z, buf);
        }
    }

    /// Adds `W[:, offset..offset+part.len()] · part` to `z`.
    pub fn add_first_layer_partial(&self, part: &[f64], offset: usize, z: &mut [f64]) {
        let layer = &self.layers[0];
        debug_assert!(offset + part.len() <= layer.fan_in());
        for (zi, row) in z.iter_mut().zip(layer.weights.iter_rows()) {
            *zi += dot(&row[offset..offset + part.len()], part);
        }
    }

    /// Gradient of `output · upstream` with respect to every parameter.
    pub fn backward(&self, cache: &ForwardCache, upstream: &[f64]) -> Result<MlpGrad> {
        Error::check_dim(self.output_dim(), upstream.len())?;
        Error::check_dim(self.layers.len(), cache.pre.len())?;
        let mut grads: Vec<Layer> = self
            .layers
            .iter()
            .map(|l| Layer::zeros(l.fan_in(), l.fan_out()))
            .collect();
        let mut delta: Vec<f64> = upstream.to_vec();
        for i in (0..self.layers.len()).rev() {
            let act = self.activation_of(i);
            let z = &cache.pre[i];
            Error::check_dim(z.len(), delta.len())?;
            for (d, &zi) in delta.iter_mut().zip(z) {
                *d *= act.derivative(zi);
            }
            let input = &cache.inputs[i];
            let g = &mut grads[i];
            for (r, &d) in delta.iter().enumerate() {
                if d != 0.0 {
                    axpy(d, input, g.weights.row_mut(r));
                }
            }
            g.bias.copy_from_slice(&delta);
            if i > 0 {
                let mut prev = vec![0.0; input.len()];
                self.layers[i].weights.matvec_t_into(&delta, &mut prev);
                delta = prev;
            }
        }
        Ok(MlpGrad { layers: grads })
    }

    /// `θ ← θ − lr · grad`. Rejects non-finite gradients without touching `self`.
    pub fn sgd_step(&mut self, grad: &MlpGrad, lr: f64) -> Result<()> {
        if !(lr >= 0.0) || !lr.is_finite() {
            return Err(Error::invalid(
                "learning rate must be finite and non-negative",
            ));
        }
        Error::check_dim(self.layers.len(), grad.layers.len())?;
        for (l, g) in self.layers.iter().zip(&grad.layers) {
            Error::check_dim(l.weights.as_slice().len(), g.weights.as_slice().len())?;
            Error::check_dim(l.bias.len(), g.bias.len())?;
        }
        if !grad.is_finite() {
            return Err(Error::NonFinite("gradient"));
        }
        if lr == 0.0 {
            return Ok(());
        }
        for (l, g) in self.layers.iter_mut().zip(&grad.layers) {
            axpy(-lr, g.weights.as_slice(), l.weights.as_mut_slice());
            axpy(-lr, &g.bias, &mut l.bias);
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.bias.len())
            .sum()
    }

    /// Parameters flattened layer by layer (weights row-major, then bias).
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    /// Mutable access to the parameter at `index` in [`Mlp::flat_params`] order.
    pub fn param_mut(&mut self, mut index: usize) -> &mut f64 {
        for l in &mut self.layers {
            let nw = l.weights.as_slice().len();
            if index < nw {
                return &mut l.weights.as_mut_slice()[index];
            }
            index -= nw;
            if index < l.bias.len() {
                return &mut l.bias[index];
            }
            index -= l.bias.len();
        }
        panic!("parameter index out of range");
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.is_finite() && l.bias.iter().all(|b| b.is_finite()))
    }
}
