//! Continuous-to-discrete action mapping.
//!
//! [`discretize_base`] is the base map `g`; [`DncMapper`] wraps the annealed
//! neighborhood search, [`MinMaxMapper`] and [`KnnMapper`] are the static
//! baselines. Every mapper is usable through the [`Mapper`] trait.

mod knn;
mod neighborhood;
mod oracle;
mod search;
mod space;

use alloc::vec::Vec;

pub use knn::{brute_force_best, knn_map, minmax_map};
pub use neighborhood::{
    generate_neighbors, lipschitz_estimate, perturbation_matrix, Neighborhood, PerturbationParams,
};
pub use oracle::{FnOracle, QOracle};
pub use search::{sa_search, sa_search_detailed, Acceptance, SaParams, SearchOutcome};
pub use space::{clip, discretize_base, enumerate_action_space, lex_cmp, ActionSpaceSpec};

use crate::{Result, Rng};

/// Turns the actor's continuous output into an action on the grid.
pub trait Mapper {
    fn map(
        &self,
        state: &[f64],
        a_hat: &[f64],
        oracle: &dyn QOracle,
        rng: &mut Rng,
    ) -> Result<Vec<f64>>;

    fn space(&self) -> &ActionSpaceSpec;

    fn name(&self) -> &'static str;
}

#[derive(Debug, Clone)]
pub struct MinMaxMapper {
    pub space: ActionSpaceSpec,
}

impl Mapper for MinMaxMapper {
    fn map(&self, _: &[f64], a_hat: &[f64], _: &dyn QOracle, _: &mut Rng) -> Result<Vec<f64>> {
        minmax_map(a_hat, &self.space)
    }

    fn space(&self) -> &ActionSpaceSpec {
        &self.space
    }

    fn name(&self) -> &'static str {
        "minmax"
    }
}

#[derive(Debug, Clone)]
pub struct DncMapper {
    pub space: ActionSpaceSpec,
    pub perturbation: PerturbationParams,
    pub search: SaParams,
}

impl DncMapper {
    pub fn new(
        space: ActionSpaceSpec,
        perturbation: PerturbationParams,
        search: SaParams,
    ) -> Result<Self> {
        search.validate()?;
        for i in 0..space.n_dims() {
            perturbation.steps_per_epsilon(&space, i)?;
        }
        Ok(DncMapper {
            space,
            perturbation,
            search,
        })
    }
}

impl Mapper for DncMapper {
    fn map(
        &self,
        state: &[f64],
        a_hat: &[f64],
        oracle: &dyn QOracle,
        rng: &mut Rng,
    ) -> Result<Vec<f64>> {
        sa_search(
            state,
            a_hat,
            oracle,
            &self.space,
            &self.perturbation,
            &self.search,
            rng,
        )
    }

    fn space(&self) -> &ActionSpaceSpec {
        &self.space
    }

    fn name(&self) -> &'static str {
        "dnc"
    }
}

/// k-nearest-neighbor mapper over the fully enumerated action space.
#[derive(Debug, Clone)]
pub struct KnnMapper {
    space: ActionSpaceSpec,
    actions: Vec<Vec<f64>>,
    k: usize,
}

impl KnnMapper {
    /// Enumerates the space up front; fails with `CardinalityExceeded` past `limit`.
    pub fn new(space: ActionSpaceSpec, k: usize, limit: usize) -> Result<Self> {
        let actions = enumerate_action_space(&space, limit)?;
        let k = k.clamp(1, actions.len());
        Ok(KnnMapper { space, actions, k })
    }

    pub fn actions(&self) -> &[Vec<f64>] {
        &self.actions
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Mapper for KnnMapper {
    fn map(
        &self,
        state: &[f64],
        a_hat: &[f64],
        oracle: &dyn QOracle,
        _: &mut Rng,
    ) -> Result<Vec<f64>> {
        knn_map(state, a_hat, &self.space, &self.actions, self.k, oracle)
    }

    fn space(&self) -> &ActionSpaceSpec {
        &self.space
    }

    fn name(&self) -> &'static str {
        "knn"
    }
}
