use alloc::vec::Vec;

use crate::Result;

/// Scores discrete actions in a state. For fixed critic parameters the scores
/// must be pure, and the output order must follow the input order.
pub trait QOracle {
    fn q_values(&self, state: &[f64], actions: &[Vec<f64>]) -> Result<Vec<f64>>;
}

impl<T: QOracle + ?Sized> QOracle for &T {
    fn q_values(&self, state: &[f64], actions: &[Vec<f64>]) -> Result<Vec<f64>> {
        (**self).q_values(state, actions)
    }
}

/// Adapts a per-action scoring closure `f(state, action)` into a [`QOracle`].
#[derive(Clone, Copy)]
pub struct FnOracle<F>(pub F);

impl<F> QOracle for FnOracle<F>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    fn q_values(&self, state: &[f64], actions: &[Vec<f64>]) -> Result<Vec<f64>> {
        Ok(actions.iter().map(|a| (self.0)(state, a)).collect())
    }
}
