use alloc::vec::Vec;

use super::space::ActionSpaceSpec;
use crate::linalg::{distance, Mat64};
use crate::{Error, Result};

/// Neighborhood depth `d` and perturbation scale `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationParams {
    pub depth: usize,
    pub epsilon: f64,
}

impl PerturbationParams {
    pub fn new(depth: usize, epsilon: f64) -> Result<Self> {
        if depth < 1 {
            return Err(Error::invalid("neighborhood depth must be at least 1"));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::invalid("epsilon must be positive"));
        }
        Ok(PerturbationParams { depth, epsilon })
    }

    /// Largest perturbation distance, `d·ε`.
    pub fn radius(&self) -> f64 {
        self.depth as f64 * self.epsilon
    }

    /// `ε` in grid steps of entry `i`; errors if `ε` is not a step multiple.
    pub fn steps_per_epsilon(&self, spec: &ActionSpaceSpec, i: usize) -> Result<i64> {
        let ratio = self.epsilon / spec.step(i);
        let rounded = libm::round(ratio);
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * rounded {
            return Err(Error::invalid(
                "epsilon must be an integer multiple of the grid step",
            ));
        }
        Ok(rounded as i64)
    }
}

/// The `N × 2dN` perturbation matrix.
///
/// Column `j` (zero-based) perturbs entry `j mod N`; the first `dN` columns
/// add `ε·(⌊j/N⌋+1)`, the last `dN` subtract `ε·(⌊j/N⌋+1-d)`.
pub fn perturbation_matrix(n: usize, params: &PerturbationParams) -> Mat64 {
    let d = params.depth;
    let mut p = Mat64::zeros(n, 2 * d * n);
    for j in 0..2 * d * n {
        let i = j % n;
        let block = j / n + 1;
        let value = if j < d * n {
            params.epsilon * block as f64
        } else {
            -params.epsilon * (block - d) as f64
        };
        p.set(i, j, value);
    }
    p
}

/// A base action, the distinct feasible actions around it (base first), and
/// optionally their Q-values.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub base: Vec<f64>,
    pub candidates: Vec<Vec<f64>>,
    pub q_values: Vec<f64>,
}

impl Neighborhood {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn with_q_values(mut self, q_values: Vec<f64>) -> Result<Self> {
        Error::check_dim(self.candidates.len(), q_values.len())?;
        self.q_values = q_values;
        Ok(self)
    }
}

/// Grid-index form of [`generate_neighbors`]: base first, then the columns of
/// `base + P` clamped into bounds, exact duplicates dropped.
pub(crate) fn neighbor_indices(
    base: &[i64],
    spec: &ActionSpaceSpec,
    params: &PerturbationParams,
    eps_steps: &[i64],
) -> Vec<Vec<i64>> {
    let n = base.len();
    let d = params.depth;
    let mut out = Vec::with_capacity(2 * d * n + 1);
    out.push(base.to_vec());
    // candidates differ from the base in one coordinate, so duplicates can only
    // come from columns that move the same coordinate to the same level
    let mut moved_to: Vec<(usize, i64)> = Vec::with_capacity(2 * d * n);
    for j in 0..2 * d * n {
        let i = j % n;
        let block = (j / n + 1) as i64;
        let shift = if j < d * n {
            block * eps_steps[i]
        } else {
            -(block - d as i64) * eps_steps[i]
        };
        let top = spec.levels(i) as i64 - 1;
        let moved = (base[i] + shift).clamp(0, top);
        if moved == base[i] || (d > 1 && moved_to.contains(&(i, moved))) {
            continue;
        }
        moved_to.push((i, moved));
        let mut cand = base.to_vec();
        cand[i] = moved;
        out.push(cand);
    }
    out
}

/// Candidate set `{ā} ∪ columns(ā + P)`, clamped onto the grid and deduplicated.
pub fn generate_neighbors(
    base: &[f64],
    spec: &ActionSpaceSpec,
    params: &PerturbationParams,
) -> Result<Neighborhood> {
    Error::check_dim(spec.n_dims(), base.len())?;
    let eps_steps = (0..spec.n_dims())
        .map(|i| params.steps_per_epsilon(spec, i))
        .collect::<Result<Vec<_>>>()?;
    let base_idx = spec.indices(base);
    let candidates = neighbor_indices(&base_idx, spec, params, &eps_steps)
        .iter()
        .map(|idx| spec.values(idx))
        .collect();
    Ok(Neighborhood {
        base: spec.values(&base_idx),
        candidates,
        q_values: Vec::new(),
    })
}

/// Smallest `L` with `|Q(a) − Q(a′)| ≤ L‖a − a′‖₂` over the neighborhood.
pub fn lipschitz_estimate(nbh: &Neighborhood) -> Result<f64> {
    if nbh.q_values.len() != nbh.candidates.len() {
        return Err(Error::TooFewCandidates);
    }
    let mut best: Option<f64> = None;
    for i in 0..nbh.candidates.len() {
        for j in i + 1..nbh.candidates.len() {
            let dist = distance(&nbh.candidates[i], &nbh.candidates[j]);
            if dist == 0.0 {
                continue;
            }
            let ratio = (nbh.q_values[i] - nbh.q_values[j]).abs() / dist;
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
    }
    best.ok_or(Error::TooFewCandidates)
}
