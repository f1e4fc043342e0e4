use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::preset::preset_paper_testbed;
use super::ExperimentError;
use crate::content::{GenerationStrategy, ReviewPolicy};
use crate::domain::{Hashtag, Topic};
use crate::fixtures::Fixtures;
use crate::plans::{EngagementPlanConfig, Plan};
use crate::sim::{BehaviorProfile, HoneypotSpec, RunSpec, ScheduleMode};

pub const SCHEMA: &str = "honeypot-experiment/v1";
pub const DEFAULT_HORIZON_DAYS: u32 = 63;
pub const DEFAULT_POPULATION: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HashtagSpec {
    pub tag: String,
    pub coverage: i64,
}

/// A topic beyond the three shipped ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicSpec {
    pub name: String,
    pub hashtags: Vec<HashtagSpec>,
}

/// A plan by name, or a full table overriding its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlanSpec {
    Name(Plan),
    Config(EngagementPlanConfig),
}

impl PlanSpec {
    pub fn config(self) -> EngagementPlanConfig {
        match self {
            PlanSpec::Name(p) => EngagementPlanConfig::new(p),
            PlanSpec::Config(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoneypotConfig {
    pub id: String,
    pub topic: String,
    pub strategies: Vec<GenerationStrategy>,
    pub plan: PlanSpec,
}

/// On-disk experiment description.
///
/// `preset = "paper-testbed"` supplies the honeypot list; explicit
/// `[[honeypots]]` entries are appended after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub seed: u64,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default = "default_horizon")]
    pub horizon_days: u32,
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default)]
    pub schedule: ScheduleMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topics: Vec<TopicSpec>,
    #[serde(default)]
    pub honeypots: Vec<HoneypotConfig>,
}

fn one() -> usize {
    1
}
fn default_horizon() -> u32 {
    DEFAULT_HORIZON_DAYS
}
fn default_population() -> usize {
    DEFAULT_POPULATION
}
fn default_profile() -> String {
    "paper-calibrated".into()
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Validation { path: path.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let raw: ExperimentConfig = toml::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
        let cfg = raw.expand()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Replaces a preset reference by its honeypots.
    fn expand(mut self) -> Result<Self, ExperimentError> {
        match self.preset.take().as_deref() {
            None => {}
            Some("paper-testbed") => {
                let mut hs = preset_paper_testbed().honeypots;
                hs.append(&mut self.honeypots);
                self.honeypots = hs;
            }
            Some(other) => return Err(invalid("preset", format!("unknown preset `{other}`"))),
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.schema != SCHEMA {
            return Err(invalid("schema", format!("expected `{SCHEMA}`, found `{}`", self.schema)));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1"));
        }
        if self.horizon_days == 0 {
            return Err(invalid("horizon_days", "must be at least 1"));
        }
        if self.honeypots.is_empty() {
            return Err(invalid("honeypots", "at least one honeypot is required"));
        }
        if BehaviorProfile::named(&self.profile).is_none() && !Path::new(&self.profile).exists() {
            return Err(invalid("profile", format!("`{}` is neither a known profile nor a file", self.profile)));
        }
        for (i, t) in self.topics.iter().enumerate() {
            self.topic_from_spec(t).map_err(|m| invalid(format!("topics[{i}]"), m))?;
        }

        let mut seen = BTreeSet::new();
        let mut dupes = BTreeSet::new();
        for h in &self.honeypots {
            if !seen.insert(h.id.as_str()) {
                dupes.insert(h.id.as_str());
            }
        }
        if !dupes.is_empty() {
            let ids: Vec<&str> = dupes.into_iter().collect();
            return Err(invalid("honeypots", format!("duplicate honeypot ids: {}", ids.join(", "))));
        }
        for (i, h) in self.honeypots.iter().enumerate() {
            let path = format!("honeypots[{i}]");
            if h.id.is_empty() {
                return Err(invalid(format!("{path}.id"), "must not be empty"));
            }
            if h.strategies.is_empty() {
                return Err(invalid(format!("{path}.strategies"), "must not be empty"));
            }
            if self.resolve_topic(&h.topic).is_none() {
                return Err(invalid(format!("{path}.topic"), format!("unknown topic `{}`", h.topic)));
            }
            if let Some(f) = h.plan.config().invalid_fields().first() {
                return Err(invalid(format!("{path}.plan.{f}"), "out of range"));
            }
        }
        Ok(())
    }

    fn topic_from_spec(&self, t: &TopicSpec) -> Result<Topic, String> {
        let pool = t
            .hashtags
            .iter()
            .map(|h| {
                let coverage = u64::try_from(h.coverage).map_err(|_| format!("negative coverage for `{}`", h.tag))?;
                Ok(Hashtag { tag: h.tag.clone(), coverage_count: coverage })
            })
            .collect::<Result<Vec<_>, String>>()?;
        let main = pool.first().map(|h| h.coverage_count).ok_or("empty hashtag pool")?;
        Topic::new(&t.name, main, pool).map_err(|e| e.to_string())
    }

    /// Custom topics shadow shipped ones of the same name.
    pub fn resolve_topic(&self, name: &str) -> Option<Arc<Topic>> {
        if let Some(t) = self.topics.iter().find(|t| t.name == name) {
            return self.topic_from_spec(t).ok().map(Arc::new);
        }
        Fixtures::builtin().topic(name).cloned()
    }

    pub fn behavior_profile(&self) -> Result<BehaviorProfile, ExperimentError> {
        if let Some(p) = BehaviorProfile::named(&self.profile) {
            return Ok(p);
        }
        let text = std::fs::read_to_string(&self.profile).map_err(|e| ExperimentError::io(&self.profile, e))?;
        BehaviorProfile::from_toml(&text).map_err(|e| invalid("profile", e.to_string()))
    }

    pub fn run_spec(&self) -> Result<RunSpec, ExperimentError> {
        let honeypots = self
            .honeypots
            .iter()
            .map(|h| HoneypotSpec {
                id: h.id.clone(),
                topic: self.resolve_topic(&h.topic).expect("validated topic"),
                strategy_mix: h.strategies.clone(),
                plan: h.plan.config(),
            })
            .collect();
        Ok(RunSpec {
            honeypots,
            horizon_days: self.horizon_days,
            population_size: self.population_size,
            profile: self.behavior_profile()?,
            review: ReviewPolicy::AutoApprove,
            schedule: self.schedule,
        })
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
    ExperimentConfig::from_toml(&text)
}
