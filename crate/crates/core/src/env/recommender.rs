use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Environment, Step};
use crate::catalog::{pick_probability_scaled, Catalog};
use crate::linalg::{squared_distance, Mat64};
use crate::mapping::ActionSpaceSpec;
use crate::{Error, Result, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEnvConfig {
    /// Number of items recommended per step.
    pub n_recommend: usize,
    pub end_prob_pick: f64,
    pub end_prob_other: f64,
    pub sigmoid_scale: f64,
    pub horizon: usize,
}

impl CatalogEnvConfig {
    pub fn new(n_recommend: usize) -> Self {
        CatalogEnvConfig {
            n_recommend,
            end_prob_pick: 0.1,
            end_prob_other: 0.2,
            sigmoid_scale: 5.0,
            horizon: 100,
        }
    }
}

/// Index of the catalog row nearest to `block` (ties to the lowest index).
pub fn project_to_catalog(block: &[f64], catalog: &Mat64) -> Result<usize> {
    if catalog.rows() == 0 {
        return Err(Error::EmptyCatalog);
    }
    Error::check_dim(catalog.cols(), block.len())?;
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, row) in catalog.iter_rows().enumerate() {
        let d = squared_distance(row, block);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecommenderStep {
    pub next_item: usize,
    pub reward: f64,
    pub done: bool,
    /// Item that was put in front of the user.
    pub offered: usize,
    pub accept_probability: f64,
    pub accepted: bool,
}

/// One user interaction.
///
/// Each recommended feature block is projected onto its nearest catalog item.
/// The projected item most similar to `last_item` is offered and picked with
/// the logistic pick probability of that similarity. A pick earns the item's
/// reward and ends the episode with `end_prob_pick`; otherwise the user moves
/// to a uniformly drawn item, earns nothing, and leaves with `end_prob_other`.
pub fn recommender_step(
    last_item: usize,
    action: &[f64],
    catalog: &Catalog,
    cfg: &CatalogEnvConfig,
    rng: &mut Rng,
) -> Result<RecommenderStep> {
    let f = catalog.n_features();
    if action.len() != cfg.n_recommend * f {
        return Err(Error::MalformedAction(format!(
            "expected {} entries ({} items x {} features), got {}",
            cfg.n_recommend * f,
            cfg.n_recommend,
            f,
            action.len()
        )));
    }
    if last_item >= catalog.len() {
        return Err(Error::invalid("last item outside the catalog"));
    }
    let mut offered = 0;
    let mut best_s = f64::NEG_INFINITY;
    for block in action.chunks_exact(f) {
        let item = project_to_catalog(block, catalog.features())?;
        let s = catalog.similarity(last_item, item);
        if s > best_s {
            best_s = s;
            offered = item;
        }
    }
    let accept_probability = pick_probability_scaled(best_s, cfg.sigmoid_scale);
    let accepted = rng.bernoulli(accept_probability);
    let (next_item, reward, end_prob) = if accepted {
        (offered, catalog.rewards()[offered], cfg.end_prob_pick)
    } else {
        (rng.index(catalog.len()), 0.0, cfg.end_prob_other)
    };
    Ok(RecommenderStep {
        next_item,
        reward,
        done: rng.bernoulli(end_prob),
        offered,
        accept_probability,
        accepted,
    })
}

/// Recommending `d` items from a catalog of `B` feature rows.
///
/// The observation is the feature row of the last picked item; the action is
/// `d` concatenated feature blocks on the two-decimal grid in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Recommender {
    catalog: Catalog,
    cfg: CatalogEnvConfig,
    space: ActionSpaceSpec,
    last_item: usize,
    t: usize,
}

impl Recommender {
    pub fn new(catalog: Catalog, cfg: CatalogEnvConfig) -> Result<Self> {
        if cfg.n_recommend == 0 || cfg.horizon == 0 {
            return Err(Error::invalid(
                "recommender needs n_recommend >= 1 and horizon >= 1",
            ));
        }
        let space =
            ActionSpaceSpec::uniform(cfg.n_recommend * catalog.n_features(), 0.0, 1.0, 0.01)?;
        Ok(Recommender {
            catalog,
            cfg,
            space,
            last_item: 0,
            t: 0,
        })
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn last_item(&self) -> usize {
        self.last_item
    }

    fn observation(&self) -> Vec<f64> {
        self.catalog.features().row(self.last_item).to_vec()
    }
}

impl Environment for Recommender {
    fn action_space(&self) -> &ActionSpaceSpec {
        &self.space
    }

    fn observation_bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); self.catalog.n_features()]
    }

    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.last_item = rng.index(self.catalog.len());
        self.t = 0;
        self.observation()
    }

    fn step(&mut self, action: &[f64], rng: &mut Rng) -> Result<Step> {
        let out = recommender_step(self.last_item, action, &self.catalog, &self.cfg, rng)?;
        self.last_item = out.next_item;
        self.t += 1;
        Ok(Step {
            observation: self.observation(),
            reward: out.reward,
            terminal: out.done,
            truncated: !out.done && self.t >= self.cfg.horizon,
        })
    }
}
