//! Discrete-event simulation of honeypots inside a synthetic network.

mod audience;
mod calibrate;
mod engine;
mod feed;
mod population;
mod profile;
mod react;
mod record;
mod schedule;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::content::{ContentError, GenerationStrategy, ReviewPolicy};
use crate::domain::{PostId, Topic};
use crate::plans::{EngagementPlanConfig, PlanError};

pub use audience::{deliver_sponsorship, AudienceSample, Categorical, SponsorAudienceModel, TopicAudience, OTHER_REGION};
pub use calibrate::{
    calibrate, default_space, evaluate, group_labels, group_means, loss, set_knob, CalibrationOutcome,
    CalibrationSettings, CalibrationStatus, CalibrationTargets, GroupTarget, Knob,
};
pub use engine::run;
pub use feed::{rank_top25, BackgroundPost, FeedCandidate, TagFeed, FEED_SIZE, SCORE_DECAY_DAYS};
pub use population::{generate_passive, generate_population, sponsored_viewer};
pub use profile::{BackgroundModel, BehaviorProfile, PassiveDilution, PopulationMix, TopicBehavior};
pub use react::{
    agent_react, react_with_affinity, reaction_probs, spambot_react, BotComment, Exposure, Reaction,
    ReactionProbs, SPAM_LATENCY_SECONDS,
};
pub use record::{
    ReplayState, RunRecord, COMMENT_COLUMNS, EVENT_COLUMNS, FOLLOWER_COLUMNS, POST_COLUMNS, SNAPSHOT_COLUMNS,
};
pub use schedule::{schedule_posts, ScheduleMode, LATEST_FIRST_POST, MIN_POST_GAP_MINUTES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("behavior profile: {0}")]
    Profile(String),
    #[error("run spec: {0}")]
    Spec(String),
    #[error("post {0} is outside its sponsorship window")]
    WindowClosed(PostId),
    #[error(transparent)]
    Content(#[from] ContentError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("calibration budget of {budget} evaluations exhausted, best loss {loss:.4}")]
    BudgetExhausted { budget: usize, loss: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostMetrics {
    pub post: PostId,
    pub likes: u32,
    pub comments: u32,
}

/// End-of-day state of one honeypot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub day: u32,
    pub followers_analytic: u32,
    pub cumulative_likes: u64,
    pub cumulative_comments: u64,
    pub per_post: Vec<PostMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoneypotSpec {
    pub id: String,
    pub topic: Arc<Topic>,
    pub strategy_mix: Vec<GenerationStrategy>,
    pub plan: EngagementPlanConfig,
}

/// Everything a single run needs besides its seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub honeypots: Vec<HoneypotSpec>,
    pub horizon_days: u32,
    pub population_size: usize,
    pub profile: BehaviorProfile,
    pub review: ReviewPolicy,
    pub schedule: ScheduleMode,
}

impl RunSpec {
    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_vec(self).expect("run spec serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.horizon_days == 0 {
            return Err(SimError::Spec("horizon_days must be at least 1".into()));
        }
        if self.honeypots.len() > usize::from(u16::MAX) {
            return Err(SimError::Spec("too many honeypots".into()));
        }
        for h in &self.honeypots {
            if h.strategy_mix.is_empty() {
                return Err(SimError::Spec(format!("honeypot `{}` has no generation strategy", h.id)));
            }
            if h.topic.hashtag_pool.len() < crate::content::CAPTION_HASHTAGS {
                return Err(SimError::Spec(format!("topic `{}` has fewer than 15 hashtags", h.topic.name)));
            }
        }
        self.profile.validate()
    }
}
