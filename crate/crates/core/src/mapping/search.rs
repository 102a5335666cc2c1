//! Simulated-annealing search over perturbation neighborhoods.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::neighborhood::{neighbor_indices, PerturbationParams};
use super::oracle::QOracle;
use super::space::{discretize_base, ActionSpaceSpec};
use crate::{Error, Result, Rng};

/// How a non-improving best neighbor is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Acceptance {
    /// Accept with probability `exp(-ΔQ/β)`.
    #[default]
    Metropolis,
    /// Accept with probability `1 - exp(-ΔQ/β)`.
    Complement,
}

impl Acceptance {
    /// Probability of moving to a neighbor whose Q-value is `gap ≥ 0` below
    /// the current base at temperature `beta`.
    pub fn probability(self, gap: f64, beta: f64) -> f64 {
        let gap = gap.max(0.0);
        let metropolis = if beta > 0.0 {
            libm::exp(-gap / beta)
        } else if gap > 0.0 {
            0.0
        } else {
            1.0
        };
        match self {
            Acceptance::Metropolis => metropolis,
            Acceptance::Complement => 1.0 - metropolis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaParams {
    /// Initial number of best neighbors kept per iteration, as a fraction of
    /// the nominal neighborhood size `2dN`.
    pub k_init_fraction: f64,
    pub beta_init: f64,
    /// Per-iteration decrease of both `k` and `β`, as a fraction of their
    /// initial values.
    pub cooling_fraction: f64,
    pub max_iters: usize,
    pub acceptance: Acceptance,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            k_init_fraction: 0.1,
            beta_init: 0.99,
            cooling_fraction: 0.25,
            max_iters: 1000,
            acceptance: Acceptance::Metropolis,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_init_fraction > 0.0 && self.k_init_fraction <= 1.0) {
            return Err(Error::invalid("k_init_fraction must lie in (0, 1]"));
        }
        if !(self.beta_init > 0.0) {
            return Err(Error::invalid("beta_init must be positive"));
        }
        if !(self.cooling_fraction > 0.0 && self.cooling_fraction <= 1.0) {
            return Err(Error::invalid("cooling_fraction must lie in (0, 1]"));
        }
        if self.max_iters < 1 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub action: Vec<f64>,
    pub q_value: f64,
    pub base_action: Vec<f64>,
    pub base_q_value: f64,
    pub iterations: usize,
    /// Distinct actions scored by the oracle.
    pub evaluations: usize,
}

struct ScoreCache<'a, O: ?Sized> {
    oracle: &'a O,
    state: &'a [f64],
    spec: &'a ActionSpaceSpec,
    scores: BTreeMap<Vec<i64>, f64>,
}

impl<O: QOracle + ?Sized> ScoreCache<'_, O> {
    /// Scores distinct `actions`, consulting the oracle only for unseen ones.
    fn score_all(&mut self, actions: &[Vec<i64>]) -> Result<Vec<f64>> {
        let missing: Vec<&Vec<i64>> = actions
            .iter()
            .filter(|a| !self.scores.contains_key(*a))
            .collect();
        if !missing.is_empty() {
            let values: Vec<Vec<f64>> = missing.iter().map(|a| self.spec.values(a)).collect();
            let q = self.oracle.q_values(self.state, &values)?;
            Error::check_dim(values.len(), q.len())?;
            for (a, v) in missing.into_iter().zip(q) {
                if !v.is_finite() {
                    return Err(Error::NonFinite("oracle Q-value"));
                }
                self.scores.insert(a.clone(), v);
            }
        }
        Ok(actions.iter().map(|a| self.scores[a]).collect())
    }
}

/// Maps `â` to a discrete action by annealed neighborhood search.
///
/// Starting from `ā = g(â)`, each iteration scores the neighborhood of `ā`,
/// keeps the `⌈k⌉` best neighbors (excluding `ā` itself) in the memory set,
/// and then either moves to the best neighbor when it improves on `ā`, moves
/// to it anyway with the annealing probability (cooling `β`), or restarts
/// from a uniformly drawn memorized action. `k` and `β` shrink linearly; the
/// loop stops when `k` reaches zero or after `max_iters` iterations. The best
/// action seen is returned, so the result never scores below `g(â)`.
pub fn sa_search_detailed<O: QOracle + ?Sized>(
    state: &[f64],
    a_hat: &[f64],
    oracle: &O,
    spec: &ActionSpaceSpec,
    pert: &PerturbationParams,
    params: &SaParams,
    rng: &mut Rng,
) -> Result<SearchOutcome> {
    params.validate()?;
    let n = spec.n_dims();
    let eps_steps = (0..n)
        .map(|i| pert.steps_per_epsilon(spec, i))
        .collect::<Result<Vec<_>>>()?;
    let start = spec.indices(&discretize_base(a_hat, spec)?);

    let mut cache = ScoreCache {
        oracle,
        state,
        spec,
        scores: BTreeMap::new(),
    };
    let start_q = cache.score_all(core::slice::from_ref(&start))?[0];

    let mut base = start.clone();
    let mut best = start.clone();
    let mut best_q = start_q;

    let mut memory: Vec<Vec<i64>> = Vec::new();
    let mut in_memory: BTreeSet<Vec<i64>> = BTreeSet::new();

    let nominal = (2 * pert.depth * n) as f64;
    let k_init = params.k_init_fraction * nominal;
    let k_step = params.cooling_fraction * k_init;
    let beta_step = params.cooling_fraction * params.beta_init;
    // Stop once k is within rounding noise of zero.
    let k_floor = 1e-9 * k_init;
    let mut k = k_init;
    let mut beta = params.beta_init;
    let mut iterations = 0;

    while k > k_floor && iterations < params.max_iters {
        iterations += 1;
        let candidates = neighbor_indices(&base, spec, pert, &eps_steps);
        let q = cache.score_all(&candidates)?;
        let base_q = q[0];

        let mut ranked: Vec<usize> = (1..candidates.len()).collect();
        if ranked.is_empty() {
            break;
        }
        ranked.sort_by(|&a, &b| match q[b].total_cmp(&q[a]) {
            Ordering::Equal => candidates[a].cmp(&candidates[b]),
            other => other,
        });
        let keep = (libm::ceil(k - 1e-12) as usize).clamp(1, ranked.len());
        for &i in &ranked[..keep] {
            if in_memory.insert(candidates[i].clone()) {
                memory.push(candidates[i].clone());
            }
        }

        let top = ranked[0];
        let top_q = q[top];
        if top_q > base_q {
            base = candidates[top].clone();
            if top_q > best_q {
                best = base.clone();
                best_q = top_q;
            }
        } else if rng.uniform() < params.acceptance.probability(base_q - top_q, beta) {
            base = candidates[top].clone();
            beta -= beta_step;
        } else {
            base = memory[rng.index(memory.len())].clone();
        }
        k -= k_step;
    }

    Ok(SearchOutcome {
        action: spec.values(&best),
        q_value: best_q,
        base_action: spec.values(&start),
        base_q_value: start_q,
        iterations,
        evaluations: cache.scores.len(),
    })
}

/// [`sa_search_detailed`] returning only the selected action.
pub fn sa_search<O: QOracle + ?Sized>(
    state: &[f64],
    a_hat: &[f64],
    oracle: &O,
    spec: &ActionSpaceSpec,
    pert: &PerturbationParams,
    params: &SaParams,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    sa_search_detailed(state, a_hat, oracle, spec, pert, params, rng).map(|o| o.action)
}
