use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use honeypot_core::experiment::{analyze_dir, load_config, preset_paper_testbed, run_experiment, ExperimentConfig};
use honeypot_core::par::Execution;
use honeypot_core::sim::{calibrate, default_space, BehaviorProfile, CalibrationSettings, CalibrationStatus, CalibrationTargets};

/// Log filter variable, e.g. `HONEYPOT_LOG=debug`.
const LOG_ENV: &str = "HONEYPOT_LOG";

#[derive(Parser)]
#[command(name = "honeypot", version, about = "Simulate and analyze general-purpose social honeypots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-replicate CSVs plus the pooled report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config replicate count.
        #[arg(long)]
        replicates: Option<usize>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Run replicates one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Recompute the report from the CSVs of a previous run.
    Analyze {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search behavior-profile parameters against group targets.
    Calibrate {
        /// CSV with `group, followers_mean, comments_mean, likes_mean` columns.
        #[arg(long)]
        targets: PathBuf,
        /// Maximum number of profile evaluations.
        #[arg(long)]
        budget: usize,
        /// Experiment to calibrate on; the testbed preset by default.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Starting profile: a name or a TOML file.
        #[arg(long, default_value = "paper-calibrated")]
        start: String,
        #[arg(long, default_value_t = 4)]
        replicates: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        /// Where to write the best profile; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a shipped experiment configuration.
    Preset {
        name: PresetName,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    PaperTestbed,
}

fn execution(sequential: bool, threads: usize) -> Execution {
    match (sequential, threads) {
        (true, _) => Execution::Sequential,
        (false, 0) => Execution::Parallel,
        (false, n) => Execution::Threads(n),
    }
}

fn start_profile(start: &str) -> Result<BehaviorProfile> {
    if let Some(p) = BehaviorProfile::named(start) {
        return Ok(p);
    }
    let text = fs::read_to_string(start).with_context(|| format!("reading profile {start}"))?;
    Ok(BehaviorProfile::from_toml(&text)?)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "info")).init();
    match Cli::parse().command {
        Command::Simulate { config, out, seed, replicates, threads, sequential } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(k) = replicates {
                if k == 0 {
                    bail!("--replicates must be at least 1");
                }
                cfg.replicates = k;
            }
            let (summary, report) = run_experiment(&cfg, &out, execution(sequential, threads))?;
            for (dir, digest) in summary.replicate_dirs.iter().zip(&summary.digests) {
                info!("{}: {digest}", dir.display());
            }
            println!("interactions_per_week: {:.1}", report.interactions_per_week()?);
            println!("report: {}", summary.report.display());
        }
        Command::Analyze { runs, out } => {
            let report = analyze_dir(&runs, &out)?;
            println!("interactions_per_week: {:.1}", report.interactions_per_week()?);
            println!("report: {}", out.join("report.txt").display());
        }
        Command::Calibrate { targets, budget, config, start, replicates, seed, tolerance, out } => {
            let text = fs::read_to_string(&targets).with_context(|| format!("reading {}", targets.display()))?;
            let targets = CalibrationTargets::from_csv(&text)?;
            let cfg = match config {
                Some(p) => load_config(&p)?,
                None => preset_paper_testbed(),
            };
            let settings = CalibrationSettings { budget, replicates, tolerance, seed, execution: Execution::Parallel };
            let outcome = calibrate(&cfg.run_spec()?, &start_profile(&start)?, &default_space(), &targets, &settings)?;
            let status = match outcome.status {
                CalibrationStatus::Converged => "converged",
                CalibrationStatus::BudgetExhausted => "budget exhausted",
            };
            info!("{status} after {} evaluations, loss {:.4}", outcome.evaluations, outcome.loss);
            let toml = outcome.profile.to_toml();
            match out {
                Some(p) => fs::write(&p, toml).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{toml}"),
            }
        }
        Command::Preset { name: PresetName::PaperTestbed, out } => {
            let cfg: ExperimentConfig = preset_paper_testbed();
            fs::write(&out, cfg.to_toml()).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}
