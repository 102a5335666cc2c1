//! Benchmark environments behind a common contract.

mod inventory;
mod maze;
mod recommender;

use alloc::vec::Vec;

pub use inventory::{
    inventory_step, inventory_step_with_demand, Demand, Inventory, InventoryConfig, InventoryStep,
};
pub use maze::{maze_step, Goal, Maze, MazeConfig, MazeStep, Rect};
pub use recommender::{
    project_to_catalog, recommender_step, CatalogEnvConfig, Recommender, RecommenderStep,
};

use crate::mapping::ActionSpaceSpec;
use crate::{Result, Rng};

/// Outcome of one environment transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub observation: Vec<f64>,
    pub reward: f64,
    /// The episode ended inside the MDP (goal reached, user left).
    pub terminal: bool,
    /// The episode was cut at the horizon.
    pub truncated: bool,
}

impl Step {
    pub fn done(&self) -> bool {
        self.terminal || self.truncated
    }
}

/// A finite-horizon episodic MDP with a grid action space.
///
/// Observations are what the networks see; they always lie inside
/// [`Environment::observation_bounds`].
pub trait Environment {
    fn action_space(&self) -> &ActionSpaceSpec;

    fn observation_bounds(&self) -> Vec<(f64, f64)>;

    fn state_dim(&self) -> usize {
        self.observation_bounds().len()
    }

    fn horizon(&self) -> usize;

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64>;

    fn step(&mut self, action: &[f64], rng: &mut Rng) -> Result<Step>;
}

impl<E: Environment + ?Sized> Environment for &mut E {
    fn action_space(&self) -> &ActionSpaceSpec {
        (**self).action_space()
    }

    fn observation_bounds(&self) -> Vec<(f64, f64)> {
        (**self).observation_bounds()
    }

    fn horizon(&self) -> usize {
        (**self).horizon()
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        (**self).reset(rng)
    }

    fn step(&mut self, action: &[f64], rng: &mut Rng) -> Result<Step> {
        (**self).step(action, rng)
    }
}
