use crate::content::GenerationStrategy::{self, ArtModel, InstaModel, QuotesModel, UnsplashModel};
use crate::plans::Plan;

use super::config::{ExperimentConfig, HoneypotConfig, PlanSpec, DEFAULT_HORIZON_DAYS, DEFAULT_POPULATION, SCHEMA};

pub const TESTBED_TOPICS: [&str; 3] = ["food", "cat", "car"];

const UQ: &[GenerationStrategy] = &[UnsplashModel, QuotesModel];
const IA: &[GenerationStrategy] = &[InstaModel, ArtModel];
const ALL: &[GenerationStrategy] = &[InstaModel, ArtModel, UnsplashModel, QuotesModel];

/// Per-topic layout; the first entry is the topic's baseline.
const LAYOUT: [(&[GenerationStrategy], Plan); 7] = [
    (UQ, Plan::Plan0),
    (UQ, Plan::Plan1),
    (UQ, Plan::Plan2),
    (IA, Plan::Plan0),
    (IA, Plan::Plan1),
    (IA, Plan::Plan2),
    (ALL, Plan::Plan2),
];

/// The 21-honeypot testbed: h1..h7 food, h8..h14 cat, h15..h21 car.
pub fn preset_paper_testbed() -> ExperimentConfig {
    let honeypots = TESTBED_TOPICS
        .iter()
        .enumerate()
        .flat_map(|(t, topic)| {
            LAYOUT.iter().enumerate().map(move |(i, (mix, plan))| HoneypotConfig {
                id: format!("h{}", t * LAYOUT.len() + i + 1),
                topic: topic.to_string(),
                strategies: mix.to_vec(),
                plan: PlanSpec::Name(*plan),
            })
        })
        .collect();
    ExperimentConfig {
        schema: SCHEMA.into(),
        preset: None,
        seed: 1,
        replicates: 1,
        horizon_days: DEFAULT_HORIZON_DAYS,
        population_size: DEFAULT_POPULATION,
        profile: "paper-calibrated".into(),
        schedule: Default::default(),
        topics: Vec::new(),
        honeypots,
    }
}

/// Ids of the baseline honeypots (simplest strategy, no engagement plan).
pub fn baseline_ids() -> [&'static str; 3] {
    ["h1", "h8", "h15"]
}
