use alloc::vec::Vec;
use core::cmp::Ordering;

use super::oracle::QOracle;
use super::space::{discretize_base, lex_cmp, ActionSpaceSpec};
use crate::linalg::squared_distance;
use crate::{Error, Result};

/// The MinMax baseline: `g(â)` with no neighborhood search.
pub fn minmax_map(a_hat: &[f64], spec: &ActionSpaceSpec) -> Result<Vec<f64>> {
    discretize_base(a_hat, spec)
}

/// Index of the highest Q-value, ties to the lexicographically first action.
fn argmax_q(actions: &[&Vec<f64>], q: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..actions.len() {
        match q[i].total_cmp(&q[best]) {
            Ordering::Greater => best = i,
            Ordering::Equal if lex_cmp(actions[i], actions[best]) == Ordering::Less => best = i,
            _ => {}
        }
    }
    best
}

/// Exhaustive argmax of the oracle over `enumerated`.
pub fn brute_force_best<O: QOracle + ?Sized>(
    state: &[f64],
    enumerated: &[Vec<f64>],
    oracle: &O,
) -> Result<Vec<f64>> {
    if enumerated.is_empty() {
        return Err(Error::EmptyActionSet);
    }
    let q = oracle.q_values(state, enumerated)?;
    Error::check_dim(enumerated.len(), q.len())?;
    let refs: Vec<&Vec<f64>> = enumerated.iter().collect();
    Ok(enumerated[argmax_q(&refs, &q)].clone())
}

/// k-nearest-neighbor mapping: the `k` enumerated actions closest to the
/// scaled proxy of `â` (ties lexicographic), then the one the oracle prefers.
pub fn knn_map<O: QOracle + ?Sized>(
    state: &[f64],
    a_hat: &[f64],
    spec: &ActionSpaceSpec,
    enumerated: &[Vec<f64>],
    k: usize,
    oracle: &O,
) -> Result<Vec<f64>> {
    if enumerated.is_empty() {
        return Err(Error::EmptyActionSet);
    }
    if k == 0 || k > enumerated.len() {
        return Err(Error::invalid("k must lie in 1..=|A|"));
    }
    let proxy = spec.scale_continuous(a_hat)?;
    let mut scored: Vec<(f64, &Vec<f64>)> = enumerated
        .iter()
        .map(|a| (squared_distance(a, &proxy), a))
        .collect();
    let order = |x: &(f64, &Vec<f64>), y: &(f64, &Vec<f64>)| match x.0.total_cmp(&y.0) {
        Ordering::Equal => lex_cmp(x.1, y.1),
        other => other,
    };
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, order);
        scored.truncate(k);
    }
    scored.sort_by(order);
    let nearest: Vec<&Vec<f64>> = scored.iter().map(|(_, a)| *a).collect();
    let batch: Vec<Vec<f64>> = nearest.iter().map(|a| (*a).clone()).collect();
    let q = oracle.q_values(state, &batch)?;
    Error::check_dim(batch.len(), q.len())?;
    Ok(batch[argmax_q(&nearest, &q)].clone())
}
