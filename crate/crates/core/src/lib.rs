//! Dynamic neighborhood construction (DNC) for actor-critic reinforcement
//! learning over large discrete action spaces.
//!
//! The crate is `no_std` (with `alloc`) and contains everything that does not
//! touch the filesystem: dense numerics and small feed-forward networks, the
//! continuous-to-discrete action mappers, the three benchmark environments,
//! recommender catalog construction, and the training loop.
//!
//! The pipeline for one decision is:
//!
//! 1. the actor emits a continuous proxy `â` (Gaussian around `tanh` means),
//! 2. [`mapping::discretize_base`] turns `â` into a base action on the grid,
//! 3. [`mapping::sa_search`] explores perturbation neighborhoods of the base
//!    action, scored by the critic, and returns the best action found.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod env;
mod error;
pub mod fourier;
pub mod gaussian;
pub mod linalg;
pub mod loss;
pub mod mapping;
pub mod mlp;
pub mod rng;
pub mod train;

pub use error::{Error, Result};
pub use linalg::Mat64;
pub use rng::{Rng, Stream};
