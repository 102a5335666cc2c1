use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{Environment, Step};
use crate::mapping::ActionSpaceSpec;
use crate::{Error, Result, Rng};

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, p: (f64, f64)) -> bool {
        p.0 >= self.x0 && p.0 <= self.x1 && p.1 >= self.y0 && p.1 <= self.y1
    }

    /// Whether the segment `a → b` touches the rectangle (Liang–Barsky clip).
    pub fn intersects_segment(&self, a: (f64, f64), b: (f64, f64)) -> bool {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for (p, q) in [
            (-dx, a.0 - self.x0),
            (dx, self.x1 - a.0),
            (-dy, a.1 - self.y0),
            (dy, self.y1 - a.1),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Goal {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MazeConfig {
    pub n_actuators: usize,
    pub step_length: f64,
    pub noise_prob: f64,
    pub step_reward: f64,
    pub goal_reward: f64,
    pub horizon: usize,
    pub walls: Vec<Rect>,
    pub start: (f64, f64),
    pub goal: Goal,
}

impl MazeConfig {
    /// Unit square with one horizontal wall `[0, 0.6] × [0.45, 0.5]`, start
    /// `(0.1, 0.1)`, goal `(0.9, 0.9)` with radius 0.05.
    pub fn default_layout(n_actuators: usize) -> Self {
        MazeConfig {
            n_actuators,
            step_length: 0.05,
            noise_prob: 0.1,
            step_reward: -0.05,
            goal_reward: 100.0,
            horizon: 150,
            walls: vec![Rect {
                x0: 0.0,
                y0: 0.45,
                x1: 0.6,
                y1: 0.5,
            }],
            start: (0.1, 0.1),
            goal: Goal {
                x: 0.9,
                y: 0.9,
                radius: 0.05,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_actuators == 0 {
            return Err(Error::invalid("maze needs at least one actuator"));
        }
        if !(0.0..=1.0).contains(&self.noise_prob) {
            return Err(Error::invalid("noise_prob must lie in [0, 1]"));
        }
        if !(self.step_length > 0.0) || self.horizon == 0 || !(self.goal.radius > 0.0) {
            return Err(Error::invalid(
                "maze step length, horizon and goal radius must be positive",
            ));
        }
        let inside = |p: (f64, f64)| (0.0..=1.0).contains(&p.0) && (0.0..=1.0).contains(&p.1);
        let goal = (self.goal.x, self.goal.y);
        for (name, p) in [("start", self.start), ("goal", goal)] {
            if !inside(p) || self.walls.iter().any(|w| w.contains(p)) {
                return Err(Error::invalid(format!(
                    "maze {name} must be inside the unit square and outside walls"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MazeStep {
    pub position: (f64, f64),
    pub reward: f64,
    pub reached_goal: bool,
    /// Whether the noise signal was applied to this move.
    pub noisy: bool,
}

/// One maze move.
///
/// Active actuators `i` push along `2πi/N`; the summed direction is divided by
/// the number of active actuators and scaled by `step_length`. With
/// probability `noise_prob` a uniform offset in `[-step_length, step_length]²`
/// is added. Moves that would cross a wall or leave the unit square are
/// cancelled.
pub fn maze_step(
    pos: (f64, f64),
    action: &[f64],
    cfg: &MazeConfig,
    rng: &mut Rng,
) -> Result<MazeStep> {
    if action.len() != cfg.n_actuators {
        return Err(Error::MalformedAction(format!(
            "expected {} actuator flags, got {}",
            cfg.n_actuators,
            action.len()
        )));
    }
    let mut dx = 0.0;
    let mut dy = 0.0;
    let mut active = 0usize;
    for (i, &a) in action.iter().enumerate() {
        if a == 1.0 {
            let angle = 2.0 * PI * i as f64 / cfg.n_actuators as f64;
            dx += libm::cos(angle);
            dy += libm::sin(angle);
            active += 1;
        } else if a != 0.0 {
            return Err(Error::MalformedAction(format!(
                "actuator flag {a} is neither 0 nor 1"
            )));
        }
    }
    let scale = cfg.step_length / active.max(1) as f64;
    dx *= scale;
    dy *= scale;

    let noisy = rng.bernoulli(cfg.noise_prob);
    if noisy {
        dx += rng.uniform_range(-cfg.step_length, cfg.step_length);
        dy += rng.uniform_range(-cfg.step_length, cfg.step_length);
    }

    let target = (pos.0 + dx, pos.1 + dy);
    let outside = !(0.0..=1.0).contains(&target.0) || !(0.0..=1.0).contains(&target.1);
    let blocked = outside || cfg.walls.iter().any(|w| w.intersects_segment(pos, target));
    let position = if blocked { pos } else { target };

    let gx = position.0 - cfg.goal.x;
    let gy = position.1 - cfg.goal.y;
    let reached_goal = gx * gx + gy * gy <= cfg.goal.radius * cfg.goal.radius;
    Ok(MazeStep {
        position,
        reward: if reached_goal {
            cfg.goal_reward
        } else {
            cfg.step_reward
        },
        reached_goal,
        noisy,
    })
}

/// Maze navigation with `N` binary actuators, `|A| = 2^N`.
#[derive(Debug, Clone)]
pub struct Maze {
    cfg: MazeConfig,
    space: ActionSpaceSpec,
    position: (f64, f64),
    t: usize,
}

impl Maze {
    pub fn new(cfg: MazeConfig) -> Result<Self> {
        cfg.validate()?;
        let space = ActionSpaceSpec::uniform(cfg.n_actuators, 0.0, 1.0, 1.0)?;
        Ok(Maze {
            position: cfg.start,
            cfg,
            space,
            t: 0,
        })
    }

    pub fn config(&self) -> &MazeConfig {
        &self.cfg
    }

    pub fn position(&self) -> (f64, f64) {
        self.position
    }
}

impl Environment for Maze {
    fn action_space(&self) -> &ActionSpaceSpec {
        &self.space
    }

    fn observation_bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0), (0.0, 1.0)]
    }

    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn reset(&mut self, _rng: &mut Rng) -> Vec<f64> {
        self.position = self.cfg.start;
        self.t = 0;
        vec![self.position.0, self.position.1]
    }

    fn step(&mut self, action: &[f64], rng: &mut Rng) -> Result<Step> {
        let out = maze_step(self.position, action, &self.cfg, rng)?;
        self.position = out.position;
        self.t += 1;
        Ok(Step {
            observation: vec![self.position.0, self.position.1],
            reward: out.reward,
            terminal: out.reached_goal,
            truncated: !out.reached_goal && self.t >= self.cfg.horizon,
        })
    }
}
