//! Experiment harness around `dnc-core`: flat-text configs, catalog ingestion,
//! seeded multi-worker runs, metrics CSVs, summaries and maze heatmaps.

pub mod catalog_io;
pub mod config;
pub mod experiment;
pub mod heatmap;
pub mod layout;
pub mod movies;
pub mod summary;

pub use config::{ConfigError, EnvKind, ExperimentConfig, Method};
pub use experiment::{
    run_experiment, ExperimentError, ExperimentOutcome, SeedOutcome, OUTPUT_ROOT_VAR,
};
