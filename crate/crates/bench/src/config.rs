//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}`: cannot parse {value:?} ({reason})")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    Maze,
    Recommender,
    Inventory,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Maze => "maze",
            EnvKind::Recommender => "recommender",
            EnvKind::Inventory => "inventory",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dnc,
    MinMax,
    Knn,
    Vac,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dnc => "dnc",
            Method::MinMax => "minmax",
            Method::Knn => "knn",
            Method::Vac => "vac",
        }
    }

    /// Whether the method needs the whole action space in memory.
    pub fn enumerates(self) -> bool {
        matches!(self, Method::Knn | Method::Vac)
    }
}

/// Every knob of one experiment. Unset keys take per-environment defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub environment: EnvKind,
    pub method: Method,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub wall_clock: bool,

    pub n_episodes: usize,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub gamma: f64,
    pub alpha_cr: f64,
    pub alpha_ac: f64,
    /// `None` means learned.
    pub sigma: Option<f64>,
    pub actor_nodes: usize,
    pub critic_nodes: usize,
    pub fourier_order: usize,
    pub fourier_coupled: bool,
    pub huber_delta: f64,
    pub reward_scale: f64,

    pub dnc_depth: usize,
    pub dnc_epsilon: f64,
    pub dnc_k: f64,
    pub dnc_cooling: f64,
    pub dnc_beta: f64,
    pub dnc_max_iters: usize,
    pub dnc_acceptance: String,
    pub knn_k: usize,
    pub enum_limit: usize,

    pub n_actuators: usize,
    pub maze_layout: Option<PathBuf>,
    pub maze_step_length: f64,
    pub maze_noise: f64,

    pub n_recommend: usize,
    pub catalog: Option<PathBuf>,
    pub catalog_seed: u64,
    pub synthetic_items: usize,
    pub synthetic_features: usize,
    pub recommender_horizon: usize,

    pub n_items: usize,
    pub inventory_horizon: usize,
}

const KEYS: &[&str] = &[
    "environment",
    "method",
    "seeds",
    "output_dir",
    "workers",
    "wall_clock",
    "n_episodes",
    "eval_every",
    "eval_episodes",
    "gamma",
    "alpha_cr",
    "alpha_ac",
    "sigma",
    "actor_nodes",
    "critic_nodes",
    "fourier_order",
    "fourier_coupled",
    "huber_delta",
    "reward_scale",
    "dnc_depth",
    "dnc_epsilon",
    "dnc_k",
    "dnc_cooling",
    "dnc_beta",
    "dnc_max_iters",
    "dnc_acceptance",
    "knn_k",
    "enum_limit",
    "n_actuators",
    "maze_layout",
    "maze_step_length",
    "maze_noise",
    "n_recommend",
    "catalog",
    "catalog_seed",
    "synthetic_items",
    "synthetic_features",
    "recommender_horizon",
    "n_items",
    "inventory_horizon",
];

impl ExperimentConfig {
    /// Defaults for `environment` and `method` before any overrides.
    pub fn defaults(environment: EnvKind, method: Method) -> Self {
        let mut c = ExperimentConfig {
            environment,
            method,
            seeds: vec![0],
            output_dir: PathBuf::from(format!("{}-{}", environment.name(), method.name())),
            workers: 1,
            wall_clock: false,
            n_episodes: 1000,
            eval_every: 100,
            eval_episodes: 10,
            gamma: 0.99,
            alpha_cr: 1e-2,
            alpha_ac: 1e-3,
            sigma: Some(0.5),
            actor_nodes: 0,
            critic_nodes: 32,
            fourier_order: 3,
            fourier_coupled: false,
            huber_delta: 1.0,
            reward_scale: 1.0,
            dnc_depth: 1,
            dnc_epsilon: 1.0,
            dnc_k: 0.1,
            dnc_cooling: 0.25,
            dnc_beta: 0.99,
            dnc_max_iters: 1000,
            dnc_acceptance: "metropolis".into(),
            knn_k: 2,
            enum_limit: 5_000_000,
            n_actuators: 8,
            maze_layout: None,
            maze_step_length: 0.2,
            maze_noise: 0.1,
            n_recommend: 1,
            catalog: None,
            catalog_seed: 0,
            synthetic_items: 1639,
            synthetic_features: 23,
            recommender_horizon: 100,
            n_items: 2,
            inventory_horizon: 100,
        };
        match environment {
            EnvKind::Maze => {
                c.alpha_cr = 1e-3;
                c.alpha_ac = 1e-5;
                c.sigma = Some(1.0);
                c.actor_nodes = 0;
                c.critic_nodes = 32;
                c.fourier_coupled = true;
                c.knn_k = 2;
                c.dnc_depth = 1;
                c.dnc_epsilon = 1.0;
            }
            EnvKind::Recommender => {
                c.alpha_cr = 1e-3;
                c.alpha_ac = 1e-4;
                c.sigma = Some(0.25);
                c.actor_nodes = 0;
                c.critic_nodes = 64;
                c.knn_k = 20;
                c.dnc_depth = 5;
                c.dnc_epsilon = 0.01;
            }
            EnvKind::Inventory => {
                c.alpha_cr = 1e-2;
                c.alpha_ac = 1e-3;
                c.sigma = Some(0.5);
                c.actor_nodes = 32;
                c.critic_nodes = 64;
                c.knn_k = 2;
                c.dnc_depth = 1;
                c.dnc_epsilon = 16.0;
                c.reward_scale = 1e-3;
            }
        }
        c
    }

    /// Parses config text, then applies `overrides` in order.
    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        pairs.extend(overrides.iter().cloned());
        Self::from_pairs(&pairs)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, overrides)
    }

    fn from_pairs(pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(k.clone()));
            }
            map.insert(k, v);
        }
        let environment = match map.get("environment").copied() {
            Some("maze") => EnvKind::Maze,
            Some("recommender") => EnvKind::Recommender,
            Some("inventory") => EnvKind::Inventory,
            Some(other) => {
                return Err(bad(
                    "environment",
                    other,
                    "expected maze, recommender or inventory",
                ))
            }
            None => return Err(ConfigError::Invalid("`environment` is required".into())),
        };
        let method = match map.get("method").copied() {
            Some("dnc") => Method::Dnc,
            Some("minmax") => Method::MinMax,
            Some("knn") => Method::Knn,
            Some("vac") => Method::Vac,
            Some(other) => return Err(bad("method", other, "expected dnc, minmax, knn or vac")),
            None => return Err(ConfigError::Invalid("`method` is required".into())),
        };
        let mut c = Self::defaults(environment, method);
        for (&k, &v) in &map {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "environment" | "method" => {}
            "seeds" => self.seeds = parse_seeds(v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            "workers" => self.workers = num(key, v)?,
            "wall_clock" => self.wall_clock = boolean(key, v)?,
            "n_episodes" => self.n_episodes = num(key, v)?,
            "eval_every" => self.eval_every = num(key, v)?,
            "eval_episodes" => self.eval_episodes = num(key, v)?,
            "gamma" => self.gamma = num(key, v)?,
            "alpha_cr" => self.alpha_cr = num(key, v)?,
            "alpha_ac" => self.alpha_ac = num(key, v)?,
            "sigma" => {
                self.sigma = if v == "learned" {
                    None
                } else {
                    Some(num(key, v)?)
                }
            }
            "actor_nodes" => self.actor_nodes = num(key, v)?,
            "critic_nodes" => self.critic_nodes = num(key, v)?,
            "fourier_order" => self.fourier_order = num(key, v)?,
            "fourier_coupled" => self.fourier_coupled = boolean(key, v)?,
            "huber_delta" => self.huber_delta = num(key, v)?,
            "reward_scale" => self.reward_scale = num(key, v)?,
            "dnc_depth" => self.dnc_depth = num(key, v)?,
            "dnc_epsilon" => self.dnc_epsilon = num(key, v)?,
            "dnc_k" => self.dnc_k = num(key, v)?,
            "dnc_cooling" => self.dnc_cooling = num(key, v)?,
            "dnc_beta" => self.dnc_beta = num(key, v)?,
            "dnc_max_iters" => self.dnc_max_iters = num(key, v)?,
            "dnc_acceptance" => match v {
                "metropolis" | "complement" => self.dnc_acceptance = v.to_string(),
                _ => return Err(bad(key, v, "expected metropolis or complement")),
            },
            "knn_k" => self.knn_k = num(key, v)?,
            "enum_limit" => self.enum_limit = num(key, v)?,
            "n_actuators" => self.n_actuators = num(key, v)?,
            "maze_layout" => self.maze_layout = optional_path(v),
            "maze_step_length" => self.maze_step_length = num(key, v)?,
            "maze_noise" => self.maze_noise = num(key, v)?,
            "n_recommend" => self.n_recommend = num(key, v)?,
            "catalog" => self.catalog = optional_path(v),
            "catalog_seed" => self.catalog_seed = num(key, v)?,
            "synthetic_items" => self.synthetic_items = num(key, v)?,
            "synthetic_features" => self.synthetic_features = num(key, v)?,
            "recommender_horizon" => self.recommender_horizon = num(key, v)?,
            "n_items" => self.n_items = num(key, v)?,
            "inventory_horizon" => self.inventory_horizon = num(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Checks that do not need the environment to be built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.seeds.is_empty() {
            return invalid("at least one seed is required");
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return invalid("seeds must be distinct");
        }
        if self.workers == 0 {
            return invalid("workers must be positive");
        }
        if self.n_episodes == 0 {
            return invalid("n_episodes must be positive");
        }
        if self.fourier_order == 0 {
            return invalid("fourier_order must be positive");
        }
        if self.knn_k == 0 {
            return invalid("knn_k must be positive");
        }
        match self.environment {
            EnvKind::Maze if self.n_actuators == 0 => invalid("n_actuators must be positive"),
            EnvKind::Recommender if self.n_recommend == 0 => {
                invalid("n_recommend must be positive")
            }
            EnvKind::Inventory if self.n_items == 0 => invalid("n_items must be positive"),
            _ => Ok(()),
        }
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        put("environment", self.environment.name().into());
        put("method", self.method.name().into());
        put(
            "seeds",
            self.seeds
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        put("output_dir", self.output_dir.display().to_string());
        put("workers", self.workers.to_string());
        put("wall_clock", self.wall_clock.to_string());
        put("n_episodes", self.n_episodes.to_string());
        put("eval_every", self.eval_every.to_string());
        put("eval_episodes", self.eval_episodes.to_string());
        put("gamma", self.gamma.to_string());
        put("alpha_cr", self.alpha_cr.to_string());
        put("alpha_ac", self.alpha_ac.to_string());
        put(
            "sigma",
            self.sigma
                .map(|s| s.to_string())
                .unwrap_or_else(|| "learned".into()),
        );
        put("actor_nodes", self.actor_nodes.to_string());
        put("critic_nodes", self.critic_nodes.to_string());
        put("fourier_order", self.fourier_order.to_string());
        put("fourier_coupled", self.fourier_coupled.to_string());
        put("huber_delta", self.huber_delta.to_string());
        put("reward_scale", self.reward_scale.to_string());
        put("dnc_depth", self.dnc_depth.to_string());
        put("dnc_epsilon", self.dnc_epsilon.to_string());
        put("dnc_k", self.dnc_k.to_string());
        put("dnc_cooling", self.dnc_cooling.to_string());
        put("dnc_beta", self.dnc_beta.to_string());
        put("dnc_max_iters", self.dnc_max_iters.to_string());
        put("dnc_acceptance", self.dnc_acceptance.clone());
        put("knn_k", self.knn_k.to_string());
        put("enum_limit", self.enum_limit.to_string());
        put("n_actuators", self.n_actuators.to_string());
        put("maze_layout", path(&self.maze_layout));
        put("maze_step_length", self.maze_step_length.to_string());
        put("maze_noise", self.maze_noise.to_string());
        put("n_recommend", self.n_recommend.to_string());
        put("catalog", path(&self.catalog));
        put("catalog_seed", self.catalog_seed.to_string());
        put("synthetic_items", self.synthetic_items.to_string());
        put("synthetic_features", self.synthetic_features.to_string());
        put("recommender_horizon", self.recommender_horizon.to_string());
        put("n_items", self.n_items.to_string());
        put("inventory_horizon", self.inventory_horizon.to_string());
        s
    }
}

fn bad(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e: T::Err| bad(key, v, &e.to_string()))
}

fn boolean(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(bad(key, v, "expected true or false")),
    }
}

fn optional_path(v: &str) -> Option<PathBuf> {
    (!v.is_empty()).then(|| PathBuf::from(v))
}

/// `0,1,2` or a half-open range `0..10`.
fn parse_seeds(v: &str) -> Result<Vec<u64>, ConfigError> {
    if let Some((a, b)) = v.split_once("..") {
        let a: u64 = num("seeds", a.trim())?;
        let b: u64 = num("seeds", b.trim())?;
        return Ok((a..b).collect());
    }
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| num("seeds", s.trim()))
        .collect()
}
