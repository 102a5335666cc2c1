//! Per-seed metrics files and the across-seed summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub const METRICS_HEADER: &str = "# dnc-bench metrics v1";
pub const SUMMARY_HEADER: &str = "# dnc-bench summary v1";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub seed: u64,
    /// Training episodes completed, starting at 1.
    pub episode: usize,
    pub train_return: f64,
    pub eval_return: Option<f64>,
    pub wall_clock_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub episode: usize,
    pub n_seeds: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single seed.
    pub std: f64,
    pub lower: f64,
    pub upper: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut s = format!("{METRICS_HEADER}\nseed,episode,train_return,eval_return,wall_clock_s\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.seed,
            r.episode,
            r.train_return,
            opt(r.eval_return),
            opt(r.wall_clock_s)
        );
    }
    s
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l == METRICS_HEADER => {}
        _ => bail!("{}: missing `{METRICS_HEADER}` line", path.display()),
    }
    let mut rdr = csv::Reader::from_reader(text.split_once('\n').map_or("", |x| x.1).as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line()) + 1;
        let ctx = || format!("{}:{line}", path.display());
        if rec.len() != 5 {
            bail!("{}: expected 5 fields", ctx());
        }
        let maybe = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse().with_context(ctx)?))
            }
        };
        rows.push(MetricsRow {
            seed: rec[0].parse().with_context(ctx)?,
            episode: rec[1].parse().with_context(ctx)?,
            train_return: rec[2].parse().with_context(ctx)?,
            eval_return: maybe(&rec[3])?,
            wall_clock_s: maybe(&rec[4])?,
        });
    }
    Ok(rows)
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Mean, sample std and the mean ± 2σ corridor at every eval point, over the
/// seeds that reported one. Seeds are sorted first, so input order does not
/// matter.
pub fn summarize(per_seed: &[Vec<MetricsRow>]) -> Vec<SummaryRow> {
    let mut by_seed: Vec<&Vec<MetricsRow>> = per_seed.iter().collect();
    by_seed.sort_by_key(|rows| rows.first().map(|r| r.seed));
    let mut points: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for rows in by_seed {
        for r in rows {
            if let Some(v) = r.eval_return {
                points.entry(r.episode).or_default().push(v);
            }
        }
    }
    points
        .into_iter()
        .map(|(episode, values)| {
            let (mean, std) = mean_std(&values);
            SummaryRow {
                episode,
                n_seeds: values.len(),
                mean,
                std,
                lower: mean - 2.0 * std,
                upper: mean + 2.0 * std,
            }
        })
        .collect()
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = format!("{SUMMARY_HEADER}\nepisode,n_seeds,mean,std,lower,upper\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.episode, r.n_seeds, r.mean, r.std, r.lower, r.upper
        );
    }
    s
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let body = match text.split_once('\n') {
        Some((first, rest)) if first == SUMMARY_HEADER => rest,
        _ => bail!("{}: missing `{SUMMARY_HEADER}` line", path.display()),
    };
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> { Ok(rec[i].parse()?) };
        out.push(SummaryRow {
            episode: rec[0].parse()?,
            n_seeds: rec[1].parse()?,
            mean: f(2)?,
            std: f(3)?,
            lower: f(4)?,
            upper: f(5)?,
        });
    }
    Ok(out)
}

/// `metrics_seed*.csv` files in `dir`, sorted by name.
pub fn metrics_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("metrics_seed") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Recomputes `summary.csv` in `dir` from its per-seed files.
pub fn summarize_dir(dir: &Path) -> Result<Vec<SummaryRow>> {
    let files = metrics_files(dir)?;
    if files.is_empty() {
        bail!("no metrics_seed*.csv files in {}", dir.display());
    }
    let per_seed = files
        .iter()
        .map(|p| read_metrics(p))
        .collect::<Result<Vec<_>>>()?;
    let rows = summarize(&per_seed);
    fs::write(dir.join("summary.csv"), summary_csv(&rows))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(seed: u64, evals: &[(usize, f64)]) -> Vec<MetricsRow> {
        evals
            .iter()
            .map(|&(episode, v)| MetricsRow {
                seed,
                episode,
                train_return: -1.0,
                eval_return: Some(v),
                wall_clock_s: None,
            })
            .collect()
    }

    #[test]
    fn single_seed_has_zero_spread() {
        let s = summarize(&[series(0, &[(10, 4.0)])]);
        assert_eq!(s[0].std, 0.0);
        assert_eq!((s[0].lower, s[0].upper), (4.0, 4.0));
    }

    #[test]
    fn two_values_hand_computed() {
        let s = summarize(&[series(0, &[(10, 1.0)]), series(1, &[(10, 3.0)])]);
        let r = &s[0];
        assert_eq!(r.mean, 2.0);
        assert!((r.std - 2f64.sqrt()).abs() < 1e-15);
        assert!((r.lower - (2.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((r.upper - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn order_invariant() {
        let a = series(0, &[(5, 1.5), (10, 7.25)]);
        let b = series(1, &[(5, -3.0), (10, 0.1)]);
        let c = series(2, &[(5, 11.0), (10, 2.2)]);
        let s1 = summarize(&[a.clone(), b.clone(), c.clone()]);
        let s2 = summarize(&[c, a, b]);
        assert_eq!(s1, s2);
    }

    #[test]
    fn csv_round_trips() {
        let rows = vec![
            MetricsRow {
                seed: 3,
                episode: 1,
                train_return: -7.499999999999989,
                eval_return: None,
                wall_clock_s: None,
            },
            MetricsRow {
                seed: 3,
                episode: 2,
                train_return: 0.1 + 0.2,
                eval_return: Some(98.95),
                wall_clock_s: Some(0.25),
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("metrics_seed3.csv");
        fs::write(&p, metrics_csv(&rows)).unwrap();
        assert_eq!(read_metrics(&p).unwrap(), rows);
        let s = summarize(&[rows]);
        fs::write(dir.path().join("summary.csv"), summary_csv(&s)).unwrap();
        assert_eq!(read_summary(&dir.path().join("summary.csv")).unwrap(), s);
        assert_eq!(summarize_dir(dir.path()).unwrap(), s);
    }
}
