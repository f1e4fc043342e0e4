use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};

use super::dataset::{read_replicate, write_replicate};
use super::report::{analyze, AnalysisReport};
use super::{ExperimentConfig, ExperimentError};
use crate::par::Execution;
use crate::rng::derive_seed;
use crate::sim::{run, RunRecord};

/// Seed of replicate `i` of an experiment seeded with `seed`.
pub fn replicate_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, &format!("replicate/{i}"))
}

/// Runs every replicate; results are in replicate order whatever the execution.
pub fn run_replicates(config: &ExperimentConfig, execution: Execution) -> Result<Vec<RunRecord>, ExperimentError> {
    let spec = config.run_spec()?;
    execution
        .map_indexed(config.replicates, |i| {
            run(&spec, replicate_seed(config.seed, i)).map_err(|source| ExperimentError::Sim { replicate: i, source })
        })
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub replicate_dirs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    /// Digest of each replicate's event and snapshot CSVs.
    pub digests: Vec<String>,
    pub report: PathBuf,
}

fn replicate_dir(out: &Path, i: usize) -> PathBuf {
    out.join(format!("replicate-{i:03}"))
}

/// Runs the experiment, writes every replicate under `out/replicate-NNN/` and
/// the pooled report into `out`.
pub fn run_experiment(
    config: &ExperimentConfig,
    out: &Path,
    execution: Execution,
) -> Result<(RunSummary, AnalysisReport), ExperimentError> {
    let records = run_replicates(config, execution)?;
    let mut data = Vec::with_capacity(records.len());
    let mut summary = RunSummary { replicate_dirs: vec![], seeds: vec![], digests: vec![], report: out.join("report.txt") };
    for (i, r) in records.iter().enumerate() {
        let dir = replicate_dir(out, i);
        data.push(write_replicate(r, &dir)?);
        info!("replicate {i} (seed {}) written to {}", r.seed, dir.display());
        summary.replicate_dirs.push(dir);
        summary.seeds.push(r.seed);
        summary.digests.push(r.digest());
    }
    let report = analyze(&data)?;
    report.write(out)?;
    Ok((summary, report))
}

/// Re-analyzes the `replicate-*` directories under `runs` and writes the report into `out`.
pub fn analyze_dir(runs: &Path, out: &Path) -> Result<AnalysisReport, ExperimentError> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(runs)
        .map_err(|e| ExperimentError::io(runs, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir() && p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("replicate-")))
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(ExperimentError::format(runs, "no replicate-* directories"));
    }
    let data = dirs.iter().map(|d| read_replicate(d)).collect::<Result<Vec<_>, _>>()?;
    let report = analyze(&data)?;
    report.write(out)?;
    Ok(report)
}
