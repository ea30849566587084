//! Thin CLI over the experiment runner:
//! `bergman-kit <experiment> --config <path> [--out <dir>] [--seed <int>]`.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric failure.
//! `BERGMAN_KIT_THREADS` caps worker parallelism.

use bergman_kit::experiments::{self, ExperimentConfig};
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bergman-kit",
    version,
    about = "Batch experiments for operator theory on Bergman spaces of the polydisc"
)]
struct Cli {
    /// Experiment to run (lattice, carleson, berezin-profile,
    /// approx-identity, bk-approx, segmented, estimators, verdict)
    experiment: String,
    /// JSON config file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `out`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("BERGMAN_KIT_THREADS") {
        match threads.parse::<usize>() {
            Ok(t) if t >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => {
                eprintln!("error: BERGMAN_KIT_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let mut config = match ExperimentConfig::from_json_file(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if config.experiment != cli.experiment {
        if !experiments::EXPERIMENTS.contains(&cli.experiment.as_str()) {
            eprintln!(
                "error: unknown experiment '{}'; known: {}",
                cli.experiment,
                experiments::EXPERIMENTS.join(", ")
            );
            return ExitCode::from(2);
        }
        config.experiment = cli.experiment.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let out_dir = cli
        .out
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    match experiments::run(&config, &out_dir) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
