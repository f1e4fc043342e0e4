//! Experiment configuration, the testbed preset, replicate orchestration and reports.

mod config;
mod dataset;
mod preset;
mod report;
mod runner;

use std::path::Path;

use thiserror::Error;

pub use config::{
    load_config, ExperimentConfig, HashtagSpec, HoneypotConfig, PlanSpec, TopicSpec, DEFAULT_HORIZON_DAYS,
    DEFAULT_POPULATION, SCHEMA,
};
pub use dataset::{read_replicate, write_replicate, ReplicateData};
pub use preset::{baseline_ids, preset_paper_testbed, TESTBED_TOPICS};
pub use report::{analyze, AnalysisReport};
pub use runner::{analyze_dir, replicate_seed, run_experiment, run_replicates, RunSummary};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config at `{path}`: {message}")]
    Validation { path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("replicate {replicate}: {source}")]
    Sim { replicate: usize, source: crate::sim::SimError },
    #[error(transparent)]
    Stats(#[from] crate::stats::StatsError),
}

impl ExperimentError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        ExperimentError::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn format(path: impl AsRef<Path>, message: impl ToString) -> Self {
        ExperimentError::Format { path: path.as_ref().display().to_string(), message: message.to_string() }
    }
}
