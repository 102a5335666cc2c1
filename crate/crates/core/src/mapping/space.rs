use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result};

const GRID_TOL: f64 = 1e-9;

/// Clamp `x` into `[c_min, c_max]`.
#[inline]
pub fn clip(x: f64, c_min: f64, c_max: f64) -> f64 {
    x.max(c_min).min(c_max)
}

/// A box of per-entry equally spaced grids, plus the clip range of the
/// continuous proxy that is mapped onto it.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpaceSpec {
    lows: Vec<f64>,
    highs: Vec<f64>,
    steps: Vec<f64>,
    levels: Vec<u64>,
    c_min: f64,
    c_max: f64,
}

impl ActionSpaceSpec {
    pub fn new(
        lows: Vec<f64>,
        highs: Vec<f64>,
        steps: Vec<f64>,
        c_min: f64,
        c_max: f64,
    ) -> Result<Self> {
        let n = lows.len();
        if n == 0 {
            return Err(Error::invalid("action space needs at least one dimension"));
        }
        Error::check_dim(n, highs.len())?;
        Error::check_dim(n, steps.len())?;
        if !(c_min < c_max) {
            return Err(Error::invalid("clip range needs c_min < c_max"));
        }
        let mut levels = Vec::with_capacity(n);
        for i in 0..n {
            let (lo, hi, step) = (lows[i], highs[i], steps[i]);
            if !(lo < hi) || !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid("action bounds need low < high and step > 0"));
            }
            let ratio = (hi - lo) / step;
            let rounded = libm::round(ratio);
            if (ratio - rounded).abs() > GRID_TOL * rounded.max(1.0) {
                return Err(Error::invalid(
                    "action range is not a multiple of the grid step",
                ));
            }
            levels.push(rounded as u64 + 1);
        }
        Ok(ActionSpaceSpec {
            lows,
            highs,
            steps,
            levels,
            c_min,
            c_max,
        })
    }

    /// `n` identical entries with clip range `[-1, 1]`.
    pub fn uniform(n: usize, low: f64, high: f64, step: f64) -> Result<Self> {
        Self::new(
            alloc::vec![low; n],
            alloc::vec![high; n],
            alloc::vec![step; n],
            -1.0,
            1.0,
        )
    }

    pub fn with_clip(mut self, c_min: f64, c_max: f64) -> Result<Self> {
        if !(c_min < c_max) {
            return Err(Error::invalid("clip range needs c_min < c_max"));
        }
        self.c_min = c_min;
        self.c_max = c_max;
        Ok(self)
    }

    #[inline]
    pub fn n_dims(&self) -> usize {
        self.lows.len()
    }

    pub fn low(&self, i: usize) -> f64 {
        self.lows[i]
    }

    pub fn high(&self, i: usize) -> f64 {
        self.highs[i]
    }

    pub fn step(&self, i: usize) -> f64 {
        self.steps[i]
    }

    /// Number of grid values of entry `i`.
    pub fn levels(&self, i: usize) -> u64 {
        self.levels[i]
    }

    pub fn clip_range(&self) -> (f64, f64) {
        (self.c_min, self.c_max)
    }

    /// Number of actions, as a float since it overflows integers quickly.
    pub fn cardinality(&self) -> f64 {
        self.levels.iter().map(|&l| l as f64).product()
    }

    /// Grid index of `value` in entry `i` (nearest, clamped).
    #[inline]
    pub fn index_of(&self, i: usize, value: f64) -> i64 {
        let raw = libm::round((value - self.lows[i]) / self.steps[i]);
        (raw as i64).clamp(0, self.levels[i] as i64 - 1)
    }

    #[inline]
    pub fn value_of(&self, i: usize, index: i64) -> f64 {
        let index = index.clamp(0, self.levels[i] as i64 - 1);
        if index as u64 == self.levels[i] - 1 {
            self.highs[i]
        } else {
            self.lows[i] + index as f64 * self.steps[i]
        }
    }

    pub fn indices(&self, action: &[f64]) -> Vec<i64> {
        action
            .iter()
            .enumerate()
            .map(|(i, &v)| self.index_of(i, v))
            .collect()
    }

    pub fn values(&self, indices: &[i64]) -> Vec<f64> {
        indices
            .iter()
            .enumerate()
            .map(|(i, &k)| self.value_of(i, k))
            .collect()
    }

    /// Nearest grid value of entry `i`, clamped into bounds.
    #[inline]
    pub fn snap(&self, i: usize, value: f64) -> f64 {
        self.value_of(i, self.index_of(i, value))
    }

    /// True when every entry is a grid value inside the bounds.
    pub fn contains(&self, action: &[f64]) -> bool {
        action.len() == self.n_dims()
            && action.iter().enumerate().all(|(i, &v)| {
                v >= self.lows[i] - GRID_TOL
                    && v <= self.highs[i] + GRID_TOL
                    && (v - self.snap(i, v)).abs() <= GRID_TOL * self.steps[i].max(1.0)
            })
    }

    /// Clip, normalize and scale `â` into the action box without rounding.
    pub fn scale_continuous(&self, a_hat: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.n_dims(), a_hat.len())?;
        Ok(a_hat
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let c = clip(a, self.c_min, self.c_max);
                (c - self.c_min) / (self.c_max - self.c_min) * (self.highs[i] - self.lows[i])
                    + self.lows[i]
            })
            .collect())
    }

    /// Per-entry min-max normalization of an action into `[0, 1]`.
    pub fn normalize(&self, action: &[f64]) -> Vec<f64> {
        action
            .iter()
            .enumerate()
            .map(|(i, &v)| (v - self.lows[i]) / (self.highs[i] - self.lows[i]))
            .collect()
    }

    /// Largest Euclidean distance between two actions of the box.
    pub fn diameter(&self) -> f64 {
        libm::sqrt(
            self.lows
                .iter()
                .zip(&self.highs)
                .map(|(l, h)| (h - l) * (h - l))
                .sum(),
        )
    }
}

/// The base action `g(â)`: clip, normalize to `[0,1]`, scale to the action
/// box, and round each entry to the nearest grid value (ties away from zero).
pub fn discretize_base(a_hat: &[f64], spec: &ActionSpaceSpec) -> Result<Vec<f64>> {
    let scaled = spec.scale_continuous(a_hat)?;
    Ok(scaled
        .iter()
        .enumerate()
        .map(|(i, &y)| spec.snap(i, y))
        .collect())
}

/// Every grid action in lexicographic order (first entry slowest).
pub fn enumerate_action_space(spec: &ActionSpaceSpec, limit: usize) -> Result<Vec<Vec<f64>>> {
    let cardinality = spec.cardinality();
    if cardinality > limit as f64 {
        return Err(Error::CardinalityExceeded { cardinality, limit });
    }
    let n = spec.n_dims();
    let mut out = Vec::with_capacity(cardinality as usize);
    let mut idx = alloc::vec![0i64; n];
    loop {
        out.push(spec.values(&idx));
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if (idx[pos] as u64) + 1 < spec.levels(pos) {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Lexicographic order on actions; used for every tie-break.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}
