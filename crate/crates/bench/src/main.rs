use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dnc_bench::catalog_io::ingest;
use dnc_bench::summary::summarize_dir;
use dnc_bench::{run_experiment, ExperimentConfig, ExperimentError, OUTPUT_ROOT_VAR};

#[derive(Parser)]
#[command(
    name = "dnc-bench",
    version,
    about = "Run and summarize DNC experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every seed of a config and write metrics into its output dir.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// `--key value` pairs overriding the config file.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Recompute summary.csv from the per-seed metrics in a directory.
    Summarize {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Build catalog.csv (and its binary cache) from a movies.csv file.
    Ingest {
        #[arg(long)]
        movies: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| format!("expected `--key value`, got {flag:?}"))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.replace('-', "_"), v.to_string()));
            continue;
        }
        let value = it
            .next()
            .ok_or_else(|| format!("missing value for --{key}"))?;
        out.push((key.replace('-', "_"), value.clone()));
    }
    Ok(out)
}

fn run(config: &Path, overrides: &[String]) -> ExitCode {
    let pairs = match parse_overrides(overrides) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = match ExperimentConfig::load(config, &pairs) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let root = std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from);
    match run_experiment(&cfg, root.as_deref()) {
        Ok(out) => {
            for s in &out.seeds {
                let last = s.final_eval().map_or("-".into(), |v| format!("{v:.3}"));
                println!("seed {}: {} steps, final eval {last}", s.seed, s.steps);
            }
            println!("wrote {}", out.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            if let ExperimentError::Infeasible(_) = e {
                eprintln!("{} cannot run this configuration", cfg.method.name());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, overrides } => run(&config, &overrides),
        Command::Summarize { dir } => match summarize_dir(&dir) {
            Ok(rows) => {
                println!("episode,n_seeds,mean,std,lower,upper");
                for r in rows {
                    println!(
                        "{},{},{},{},{},{}",
                        r.episode, r.n_seeds, r.mean, r.std, r.lower, r.upper
                    );
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
        Command::Ingest { movies, out } => match ingest(&movies, &out) {
            Ok(r) => {
                println!(
                    "{} records, {} features, {} unique rows{}",
                    r.records,
                    r.vocabulary,
                    r.unique_rows,
                    if r.from_cache { " (cached)" } else { "" }
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
    }
}
