use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Environment, Step};
use crate::mapping::ActionSpaceSpec;
use crate::{Error, Result, Rng};

/// Per-item demand per period.
#[derive(Debug, Clone, PartialEq)]
pub enum Demand {
    Poisson(Vec<f64>),
    /// Fixed demand every period; useful for hand-checkable runs.
    Constant(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventoryConfig {
    pub n_items: usize,
    pub s_max: u32,
    pub holding_cost: Vec<f64>,
    pub backorder_cost: Vec<f64>,
    pub order_cost: Vec<f64>,
    pub common_order_cost: f64,
    pub demand: Demand,
    pub init_inventory: f64,
    pub horizon: usize,
    /// Range the observed levels are clipped to before reaching the networks.
    pub observation_clip: (f64, f64),
}

impl InventoryConfig {
    /// `h = 1`, `b = 19`, `o = 10`, `O = 75`, levels start at 25, 100 periods;
    /// the first half of the items (rounded up) has Poisson rate 10, the rest 20.
    pub fn new(n_items: usize) -> Self {
        let rates = (0..n_items)
            .map(|i| if i < n_items.div_ceil(2) { 10.0 } else { 20.0 })
            .collect();
        InventoryConfig {
            n_items,
            s_max: 66,
            holding_cost: vec![1.0; n_items],
            backorder_cost: vec![19.0; n_items],
            order_cost: vec![10.0; n_items],
            common_order_cost: 75.0,
            demand: Demand::Poisson(rates),
            init_inventory: 25.0,
            horizon: 100,
            observation_clip: (-50.0, 66.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_items;
        if n == 0 {
            return Err(Error::invalid("inventory needs at least one item"));
        }
        for v in [&self.holding_cost, &self.backorder_cost, &self.order_cost] {
            Error::check_dim(n, v.len())?;
        }
        match &self.demand {
            Demand::Poisson(rates) => {
                Error::check_dim(n, rates.len())?;
                if rates.iter().any(|l| !(*l > 0.0)) {
                    return Err(Error::invalid("demand rates must be positive"));
                }
            }
            Demand::Constant(d) => Error::check_dim(n, d.len())?,
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon must be positive"));
        }
        if !(self.observation_clip.0 < self.observation_clip.1) {
            return Err(Error::invalid("observation clip needs low < high"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventoryStep {
    pub levels: Vec<f64>,
    pub orders: Vec<f64>,
    pub cost: f64,
    pub reward: f64,
}

/// Order up to `order_up_to`, receive immediately, then serve `demand`.
pub fn inventory_step_with_demand(
    levels: &[f64],
    order_up_to: &[f64],
    cfg: &InventoryConfig,
    demand: &[u64],
) -> Result<InventoryStep> {
    let n = cfg.n_items;
    Error::check_dim(n, levels.len())?;
    Error::check_dim(n, demand.len())?;
    if order_up_to.len() != n {
        return Err(Error::MalformedAction(format!(
            "expected {n} order-up-to levels, got {}",
            order_up_to.len()
        )));
    }
    let s_max = cfg.s_max as f64;
    let mut next = Vec::with_capacity(n);
    let mut orders = Vec::with_capacity(n);
    let mut cost = 0.0;
    for i in 0..n {
        let s = order_up_to[i];
        if !(0.0..=s_max).contains(&s) || s != libm::round(s) {
            return Err(Error::MalformedAction(format!(
                "order-up-to level {s} is not an integer in [0, {s_max}]"
            )));
        }
        let q = (s - levels[i]).max(0.0);
        let level = levels[i] + q - demand[i] as f64;
        cost += cfg.holding_cost[i] * level.max(0.0) + cfg.backorder_cost[i] * (-level).max(0.0);
        if q > 0.0 {
            cost += cfg.order_cost[i];
        }
        orders.push(q);
        next.push(level);
    }
    if orders.iter().any(|q| *q > 0.0) {
        cost += cfg.common_order_cost;
    }
    Ok(InventoryStep {
        levels: next,
        orders,
        cost,
        reward: -cost,
    })
}

/// [`inventory_step_with_demand`] with demand drawn from the configured model.
pub fn inventory_step(
    levels: &[f64],
    order_up_to: &[f64],
    cfg: &InventoryConfig,
    rng: &mut Rng,
) -> Result<InventoryStep> {
    let demand: Vec<u64> = match &cfg.demand {
        Demand::Poisson(rates) => rates.iter().map(|&l| rng.poisson(l)).collect(),
        Demand::Constant(d) => d.clone(),
    };
    inventory_step_with_demand(levels, order_up_to, cfg, &demand)
}

/// Joint replenishment of `N` items with order-up-to actions, `|A| = (S_max+1)^N`.
#[derive(Debug, Clone)]
pub struct Inventory {
    cfg: InventoryConfig,
    space: ActionSpaceSpec,
    levels: Vec<f64>,
    t: usize,
}

impl Inventory {
    pub fn new(cfg: InventoryConfig) -> Result<Self> {
        cfg.validate()?;
        let space = ActionSpaceSpec::uniform(cfg.n_items, 0.0, cfg.s_max as f64, 1.0)?;
        Ok(Inventory {
            levels: vec![cfg.init_inventory; cfg.n_items],
            cfg,
            space,
            t: 0,
        })
    }

    pub fn config(&self) -> &InventoryConfig {
        &self.cfg
    }

    /// Raw stock levels, negative for backorders.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    fn observation(&self) -> Vec<f64> {
        let (lo, hi) = self.cfg.observation_clip;
        self.levels.iter().map(|l| l.clamp(lo, hi)).collect()
    }
}

impl Environment for Inventory {
    fn action_space(&self) -> &ActionSpaceSpec {
        &self.space
    }

    fn observation_bounds(&self) -> Vec<(f64, f64)> {
        vec![self.cfg.observation_clip; self.cfg.n_items]
    }

    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn reset(&mut self, _rng: &mut Rng) -> Vec<f64> {
        self.levels = vec![self.cfg.init_inventory; self.cfg.n_items];
        self.t = 0;
        self.observation()
    }

    fn step(&mut self, action: &[f64], rng: &mut Rng) -> Result<Step> {
        let out = inventory_step(&self.levels, action, &self.cfg, rng)?;
        self.levels = out.levels;
        self.t += 1;
        Ok(Step {
            observation: self.observation(),
            reward: out.reward,
            terminal: false,
            truncated: self.t >= self.cfg.horizon,
        })
    }
}
