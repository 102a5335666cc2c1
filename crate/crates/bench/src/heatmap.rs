//! Visitation counts over the unit square.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{ensure, Result};

pub const RESOLUTION: usize = 50;

/// Square grid of counts. Row 0 is the top edge (`y` near 1), matching the
/// image orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitGrid {
    n: usize,
    counts: Vec<u64>,
}

impl VisitGrid {
    pub fn new(n: usize) -> Self {
        VisitGrid {
            n,
            counts: vec![0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Records a position in `[0, 1]²`; values on the upper edges fall into
    /// the last cell.
    pub fn record(&mut self, x: f64, y: f64) {
        let cell = |v: f64| ((v.clamp(0.0, 1.0) * self.n as f64) as usize).min(self.n - 1);
        let row = self.n - 1 - cell(y);
        let col = cell(x);
        self.counts[row * self.n + col] += 1;
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.n + col]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.counts.chunks(self.n) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    /// Binary graymap with `255·ln(1+c)/ln(1+max)` intensities.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.n, self.n).into_bytes();
        let max = self.counts.iter().copied().max().unwrap_or(0);
        let denom = (max as f64).ln_1p();
        out.extend(self.counts.iter().map(|&c| {
            if max == 0 {
                0
            } else {
                (255.0 * (c as f64).ln_1p() / denom).round() as u8
            }
        }));
        out
    }
}

pub fn export_heatmap(grid: &VisitGrid, csv_path: &Path, pgm_path: &Path) -> Result<()> {
    ensure!(grid.size() > 0, "empty visitation grid");
    fs::write(csv_path, grid.to_csv())?;
    fs::write(pgm_path, grid.to_pgm())?;
    Ok(())
}
