//! Maze layouts as text.
//!
//! ```text
//! # x0 y0 x1 y1
//! wall 0.0 0.45 0.6 0.5
//! start 0.1 0.1
//! goal 0.9 0.9 0.05
//! ```
//!
//! Lines that are missing keep the default layout's values; any `wall` line
//! replaces the default walls.

use anyhow::{bail, Context, Result};
use dnc_core::env::{Goal, MazeConfig, Rect};

pub fn parse_layout(text: &str, mut cfg: MazeConfig) -> Result<MazeConfig> {
    let mut walls = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let kind = parts.next().unwrap_or_default();
        let nums: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>()
                    .with_context(|| format!("layout line {}: bad number {p:?}", i + 1))
            })
            .collect::<Result<_>>()?;
        let want = match kind {
            "wall" => 4,
            "start" => 2,
            "goal" => 3,
            _ => bail!("layout line {}: unknown entry {kind:?}", i + 1),
        };
        if nums.len() != want {
            bail!(
                "layout line {}: `{kind}` takes {want} numbers, got {}",
                i + 1,
                nums.len()
            );
        }
        match kind {
            "wall" => walls.push(Rect {
                x0: nums[0].min(nums[2]),
                y0: nums[1].min(nums[3]),
                x1: nums[0].max(nums[2]),
                y1: nums[1].max(nums[3]),
            }),
            "start" => cfg.start = (nums[0], nums[1]),
            _ => {
                cfg.goal = Goal {
                    x: nums[0],
                    y: nums[1],
                    radius: nums[2],
                }
            }
        }
    }
    if !walls.is_empty() {
        cfg.walls = walls;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout_text_matches() {
        let base = MazeConfig::default_layout(4);
        let text = "wall 0.0 0.45 0.6 0.5\nstart 0.1 0.1\ngoal 0.9 0.9 0.05\n";
        assert_eq!(parse_layout(text, base.clone()).unwrap(), base);
    }

    #[test]
    fn two_walls_and_errors() {
        let base = MazeConfig::default_layout(4);
        let cfg = parse_layout(
            "wall 0 0.3 0.5 0.35\nwall 1 0.7 0.4 0.65 # upper\n",
            base.clone(),
        )
        .unwrap();
        assert_eq!(cfg.walls.len(), 2);
        assert_eq!(cfg.walls[1].x0, 0.4);
        assert!(parse_layout("door 1 2", base.clone()).is_err());
        assert!(parse_layout("start 0.1", base.clone()).is_err());
        // start inside a wall
        assert!(parse_layout("start 0.3 0.47", base).is_err());
    }
}
