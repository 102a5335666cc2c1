//! Running a configured experiment: environments, mappers, training, files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use dnc_core::catalog::{synthetic_catalog, Catalog};
use dnc_core::env::{
    CatalogEnvConfig, Environment, Inventory, InventoryConfig, Maze, MazeConfig, Recommender,
};
use dnc_core::mapping::{
    Acceptance, DncMapper, KnnMapper, Mapper, MinMaxMapper, PerturbationParams, SaParams,
};
use dnc_core::train::{
    train_run, vac_train_run, EvalPoint, FeatureConfig, SigmaMode, TrainConfig, TrainEvent,
};
use thiserror::Error;

use crate::catalog_io::read_catalog_csv;
use crate::config::{EnvKind, ExperimentConfig, Method};
use crate::heatmap::{export_heatmap, VisitGrid, RESOLUTION};
use crate::layout::parse_layout;
use crate::summary::{metrics_csv, summarize, summary_csv, MetricsRow, SummaryRow};

/// Environment variable naming the directory relative output dirs live in.
pub const OUTPUT_ROOT_VAR: &str = "DNC_OUTPUT_ROOT";

#[derive(Debug, Error)]
pub enum ExperimentError {
    /// The configuration cannot be run as written.
    #[error("configuration error: {0}")]
    Config(String),
    /// The method cannot handle an action space this large.
    #[error("skipped: {0}")]
    Infeasible(String),
    #[error("seed {seed}: {source}")]
    Run { seed: u64, source: dnc_core::Error },
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Infeasible(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub seed: u64,
    pub episode_returns: Vec<f64>,
    pub evals: Vec<EvalPoint>,
    pub steps: u64,
    pub visits: Option<VisitGrid>,
    /// Seconds since the run started, at the end of each training episode.
    pub elapsed_s: Vec<f64>,
}

impl SeedOutcome {
    pub fn final_eval(&self) -> Option<f64> {
        self.evals.last().map(|e| e.mean_return)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub output_dir: PathBuf,
    pub seeds: Vec<SeedOutcome>,
    pub summary: Vec<SummaryRow>,
}

/// `dir` itself when absolute, otherwise `root/dir`.
pub fn resolve_output_dir(dir: &Path, root: Option<&Path>) -> PathBuf {
    match root {
        Some(r) if dir.is_relative() => r.join(dir),
        _ => dir.to_path_buf(),
    }
}

pub fn train_config(cfg: &ExperimentConfig) -> TrainConfig {
    let hidden = |n: usize| if n == 0 { Vec::new() } else { vec![n, n] };
    TrainConfig {
        gamma: cfg.gamma,
        alpha_cr: cfg.alpha_cr,
        alpha_ac: cfg.alpha_ac,
        sigma: match cfg.sigma {
            Some(s) => SigmaMode::Constant(s),
            None => SigmaMode::Learned { init: 0.5 },
        },
        n_episodes: cfg.n_episodes,
        eval_every: cfg.eval_every,
        eval_episodes: cfg.eval_episodes,
        actor_hidden: hidden(cfg.actor_nodes),
        critic_hidden: hidden(cfg.critic_nodes),
        features: FeatureConfig {
            order: cfg.fourier_order,
            coupled: cfg.fourier_coupled,
        },
        huber_delta: cfg.huber_delta,
        reward_scale: cfg.reward_scale,
    }
}

pub fn maze_config(cfg: &ExperimentConfig) -> Result<MazeConfig, ExperimentError> {
    let mut mc = MazeConfig::default_layout(cfg.n_actuators);
    mc.step_length = cfg.maze_step_length;
    mc.noise_prob = cfg.maze_noise;
    if let Some(path) = &cfg.maze_layout {
        let text = fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("maze layout {}: {e}", path.display())))?;
        mc = parse_layout(&text, mc).map_err(|e| ExperimentError::Config(format!("{e:#}")))?;
    }
    mc.validate()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    Ok(mc)
}

fn load_catalog(cfg: &ExperimentConfig) -> Result<Catalog, ExperimentError> {
    let catalog = match &cfg.catalog {
        Some(path) => {
            read_catalog_csv(path)
                .map_err(|e| ExperimentError::Config(format!("catalog: {e:#}")))?
                .catalog
        }
        None => synthetic_catalog(
            cfg.catalog_seed,
            cfg.synthetic_items,
            cfg.synthetic_features,
        )
        .map_err(|e| ExperimentError::Config(e.to_string()))?,
    };
    Ok(catalog.precompute_similarity())
}

/// Environment factory shared by every seed of one experiment.
#[derive(Debug, Clone)]
pub enum EnvSpec {
    Maze(MazeConfig),
    Recommender(Catalog, CatalogEnvConfig),
    Inventory(InventoryConfig),
}

impl EnvSpec {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, ExperimentError> {
        let spec = match cfg.environment {
            EnvKind::Maze => EnvSpec::Maze(maze_config(cfg)?),
            EnvKind::Recommender => {
                let mut rc = CatalogEnvConfig::new(cfg.n_recommend);
                rc.horizon = cfg.recommender_horizon;
                EnvSpec::Recommender(load_catalog(cfg)?, rc)
            }
            EnvKind::Inventory => {
                let mut ic = InventoryConfig::new(cfg.n_items);
                ic.horizon = cfg.inventory_horizon;
                ic.validate()
                    .map_err(|e| ExperimentError::Config(e.to_string()))?;
                EnvSpec::Inventory(ic)
            }
        };
        // Build once so parameter errors surface before any seed starts.
        spec.build()?;
        Ok(spec)
    }

    pub fn build(&self) -> Result<Box<dyn Environment + Send>, ExperimentError> {
        let config = |e: dnc_core::Error| ExperimentError::Config(e.to_string());
        Ok(match self {
            EnvSpec::Maze(mc) => Box::new(Maze::new(mc.clone()).map_err(config)?),
            EnvSpec::Recommender(cat, rc) => {
                Box::new(Recommender::new(cat.clone(), rc.clone()).map_err(config)?)
            }
            EnvSpec::Inventory(ic) => Box::new(Inventory::new(ic.clone()).map_err(config)?),
        })
    }
}

fn build_mapper(
    cfg: &ExperimentConfig,
    env: &dyn Environment,
) -> Result<Option<Box<dyn Mapper + Send + Sync>>, ExperimentError> {
    let space = env.action_space().clone();
    let config = |e: dnc_core::Error| ExperimentError::Config(e.to_string());
    Ok(match cfg.method {
        Method::MinMax => Some(Box::new(MinMaxMapper { space })),
        Method::Dnc => {
            let perturbation =
                PerturbationParams::new(cfg.dnc_depth, cfg.dnc_epsilon).map_err(config)?;
            let search = SaParams {
                k_init_fraction: cfg.dnc_k,
                beta_init: cfg.dnc_beta,
                cooling_fraction: cfg.dnc_cooling,
                max_iters: cfg.dnc_max_iters,
                acceptance: if cfg.dnc_acceptance == "complement" {
                    Acceptance::Complement
                } else {
                    Acceptance::Metropolis
                },
            };
            Some(Box::new(
                DncMapper::new(space, perturbation, search).map_err(config)?,
            ))
        }
        Method::Knn => Some(Box::new(
            KnnMapper::new(space, cfg.knn_k, cfg.enum_limit).map_err(infeasible)?,
        )),
        Method::Vac => None,
    })
}

fn infeasible(e: dnc_core::Error) -> ExperimentError {
    match e {
        dnc_core::Error::CardinalityExceeded { .. } => ExperimentError::Infeasible(e.to_string()),
        other => ExperimentError::Config(other.to_string()),
    }
}

/// Refuses enumerating methods on spaces over `enum_limit` before anything runs.
pub fn check_feasible(
    cfg: &ExperimentConfig,
    env: &dyn Environment,
) -> Result<(), ExperimentError> {
    let cardinality = env.action_space().cardinality();
    if cfg.method.enumerates() && !(cardinality <= cfg.enum_limit as f64) {
        return Err(infeasible(dnc_core::Error::CardinalityExceeded {
            cardinality,
            limit: cfg.enum_limit,
        }));
    }
    Ok(())
}

/// Trains one seed. `mapper` is `None` for the categorical baseline.
pub fn run_seed(
    cfg: &ExperimentConfig,
    spec: &EnvSpec,
    mapper: Option<&(dyn Mapper + Send + Sync)>,
    seed: u64,
) -> Result<SeedOutcome, ExperimentError> {
    let tc = train_config(cfg);
    let mut env = spec.build()?;
    let mut visits = matches!(spec, EnvSpec::Maze(_)).then(|| VisitGrid::new(RESOLUTION));
    let start = Instant::now();
    let mut elapsed_s = Vec::with_capacity(cfg.n_episodes);
    let mut observer = |e: &TrainEvent<'_>| match e {
        TrainEvent::EnvStep { observation, .. } => {
            if let Some(grid) = visits.as_mut() {
                grid.record(observation[0], observation[1]);
            }
        }
        TrainEvent::EpisodeEnd { .. } => elapsed_s.push(start.elapsed().as_secs_f64()),
        _ => {}
    };
    let run = |e| ExperimentError::Run { seed, source: e };
    let (episode_returns, evals, steps) = match mapper {
        Some(m) => {
            let r = train_run(&mut *env, m, &tc, seed, &mut observer).map_err(run)?;
            (r.episode_returns, r.evals, r.steps)
        }
        None => {
            let r = vac_train_run(&mut *env, &tc, seed, cfg.enum_limit, &mut observer).map_err(
                |e| match e {
                    dnc_core::Error::CardinalityExceeded { .. } => infeasible(e),
                    e => run(e),
                },
            )?;
            (r.episode_returns, r.evals, r.steps)
        }
    };
    Ok(SeedOutcome {
        seed,
        episode_returns,
        evals,
        steps,
        visits,
        elapsed_s,
    })
}

pub fn metrics_rows(outcome: &SeedOutcome, clock: Option<&[f64]>) -> Vec<MetricsRow> {
    let mut evals = outcome.evals.iter().peekable();
    outcome
        .episode_returns
        .iter()
        .enumerate()
        .map(|(i, &train_return)| {
            let episode = i + 1;
            let eval_return = evals
                .next_if(|e| e.episode == episode)
                .map(|e| e.mean_return);
            MetricsRow {
                seed: outcome.seed,
                episode,
                train_return,
                eval_return,
                wall_clock_s: clock.map(|c| c[i]),
            }
        })
        .collect()
}

fn write_seed_files(
    dir: &Path,
    outcome: &SeedOutcome,
    clock: Option<&[f64]>,
) -> anyhow::Result<()> {
    let seed = outcome.seed;
    fs::write(
        dir.join(format!("metrics_seed{seed}.csv")),
        metrics_csv(&metrics_rows(outcome, clock)),
    )?;
    if let Some(grid) = &outcome.visits {
        export_heatmap(
            grid,
            &dir.join(format!("visits_seed{seed}.csv")),
            &dir.join(format!("visits_seed{seed}.pgm")),
        )?;
    }
    Ok(())
}

/// Runs every seed of `cfg` on `cfg.workers` threads and writes
/// `config.txt`, `metrics_seed{s}.csv`, `summary.csv` and, for the maze,
/// `visits_seed{s}.{csv,pgm}` into the output directory.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    output_root: Option<&Path>,
) -> Result<ExperimentOutcome, ExperimentError> {
    cfg.validate()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    train_config(cfg)
        .validate()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let spec = EnvSpec::from_config(cfg)?;
    let probe = spec.build()?;
    check_feasible(cfg, probe.as_ref())?;
    let mapper = build_mapper(cfg, probe.as_ref())?;
    drop(probe);

    let dir = resolve_output_dir(&cfg.output_dir, output_root);
    fs::create_dir_all(&dir).map_err(|e| anyhow::anyhow!("creating {}: {e}", dir.display()))?;
    fs::write(dir.join("config.txt"), cfg.to_text()).map_err(anyhow::Error::from)?;

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Result<SeedOutcome, ExperimentError>>> = Mutex::new(Vec::new());
    let workers = cfg.workers.min(cfg.seeds.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&seed) = cfg.seeds.get(i) else {
                    break;
                };
                let res = run_seed(cfg, &spec, mapper.as_deref(), seed).and_then(|o| {
                    let clock = cfg.wall_clock.then_some(o.elapsed_s.as_slice());
                    write_seed_files(&dir, &o, clock)?;
                    Ok(o)
                });
                results
                    .lock()
                    .expect("no worker panics while holding the lock")
                    .push(res);
            });
        }
    });

    let mut seeds = Vec::with_capacity(cfg.seeds.len());
    for r in results.into_inner().expect("workers joined") {
        seeds.push(r?);
    }
    seeds.sort_by_key(|s| cfg.seeds.iter().position(|&x| x == s.seed));
    let per_seed: Vec<Vec<MetricsRow>> = seeds.iter().map(|s| metrics_rows(s, None)).collect();
    let summary = summarize(&per_seed);
    fs::write(dir.join("summary.csv"), summary_csv(&summary)).map_err(anyhow::Error::from)?;
    Ok(ExperimentOutcome {
        output_dir: dir,
        seeds,
        summary,
    })
}
