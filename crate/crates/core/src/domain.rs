//! Shared domain vocabulary: topics, agents, honeypots, posts and the
//! engagement events that connect them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::content::{ContentDescriptor, GenerationStrategy};
use crate::plans::EngagementPlanConfig;
use crate::sim::MetricsSnapshot;
use crate::time::SimTime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("coverage count must be positive, got {0}")]
    NonPositiveCoverage(i64),
    #[error("hashtag pool of topic `{topic}` is not sorted by coverage (rank {rank})")]
    UnsortedPool { topic: String, rank: usize },
    #[error("unknown {what} `{value}`")]
    UnknownName { what: &'static str, value: String },
}

const HIGH_COVERAGE: i64 = 400_000_000;
const MEDIUM_COVERAGE: i64 = 150_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CoverageClass {
    High,
    Medium,
    Low,
}

/// Audience-size class of a hashtag from the number of posts carrying it.
pub fn classify_coverage(coverage_count: i64) -> Result<CoverageClass, DomainError> {
    match coverage_count {
        c if c <= 0 => Err(DomainError::NonPositiveCoverage(c)),
        c if c >= HIGH_COVERAGE => Ok(CoverageClass::High),
        c if c >= MEDIUM_COVERAGE => Ok(CoverageClass::Medium),
        _ => Ok(CoverageClass::Low),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hashtag {
    pub tag: String,
    pub coverage_count: u64,
}

/// A honeypot topic and its ranked hashtag pool (rank 1 = most used).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topic {
    pub name: String,
    pub coverage_count: u64,
    pub coverage_class: CoverageClass,
    pub hashtag_pool: Vec<Hashtag>,
}

impl Topic {
    pub fn new(
        name: impl Into<String>,
        coverage_count: u64,
        hashtag_pool: Vec<Hashtag>,
    ) -> Result<Self, DomainError> {
        let name = name.into();
        let coverage_class = classify_coverage(coverage_count.min(i64::MAX as u64) as i64)?;
        for (rank, pair) in hashtag_pool.windows(2).enumerate() {
            if pair[1].coverage_count > pair[0].coverage_count {
                return Err(DomainError::UnsortedPool { topic: name, rank: rank + 2 });
            }
        }
        Ok(Topic { name, coverage_count, coverage_class, hashtag_pool })
    }

    /// The topic's own hashtag, i.e. the first entry of the pool.
    pub fn main_hashtag(&self) -> &str {
        self.hashtag_pool.first().map(|h| h.tag.as_str()).unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl FromStr for AgentId {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('a')
            .and_then(|n| n.parse().ok())
            .map(AgentId)
            .ok_or_else(|| DomainError::UnknownName { what: "agent id", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PostId(pub u64);

impl fmt::Display for PostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl FromStr for PostId {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('p')
            .and_then(|n| n.parse().ok())
            .map(PostId)
            .ok_or_else(|| DomainError::UnknownName { what: "post id", value: s.to_string() })
    }
}

/// Position of a honeypot within its run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HoneypotRef(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgentCategory {
    RealPerson,
    PageInfluencer,
    SpamBot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    F,
    M,
    Unspecified,
}

impl Gender {
    pub const ALL: [Gender; 3] = [Gender::F, Gender::M, Gender::Unspecified];

    pub fn label(self) -> &'static str {
        match self {
            Gender::F => "F",
            Gender::M => "M",
            Gender::Unspecified => "U",
        }
    }
}

impl FromStr for Gender {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Gender::ALL
            .into_iter()
            .find(|g| g.label() == s)
            .ok_or_else(|| DomainError::UnknownName { what: "gender", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgeBucket {
    Age13To17,
    Age18To24,
    Age25To34,
    Age35To44,
    Age45To54,
    Age55To64,
    Age65Plus,
}

impl AgeBucket {
    pub const ALL: [AgeBucket; 7] = [
        AgeBucket::Age13To17,
        AgeBucket::Age18To24,
        AgeBucket::Age25To34,
        AgeBucket::Age35To44,
        AgeBucket::Age45To54,
        AgeBucket::Age55To64,
        AgeBucket::Age65Plus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AgeBucket::Age13To17 => "13-17",
            AgeBucket::Age18To24 => "18-24",
            AgeBucket::Age25To34 => "25-34",
            AgeBucket::Age35To44 => "35-44",
            AgeBucket::Age45To54 => "45-54",
            AgeBucket::Age55To64 => "55-64",
            AgeBucket::Age65Plus => "65+",
        }
    }
}

impl FromStr for AgeBucket {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgeBucket::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| DomainError::UnknownName { what: "age bucket", value: s.to_string() })
    }
}

/// Affinity at or above which an account is treated as posting topic-specific content.
pub const TOPIC_FOCUS_AFFINITY: f64 = 0.8;

/// A simulated account.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: AgentId,
    pub category: AgentCategory,
    pub gender: Gender,
    pub age_bucket: AgeBucket,
    pub region: String,
    pub follower_count: u32,
    pub following_count: u32,
    pub post_count: u32,
    pub has_real_picture: bool,
    pub username_entropy: f64,
    pub interests: BTreeMap<String, f64>,
    /// Expected feed-browsing sessions per day.
    pub activity_rate: f64,
    /// Hashtags a spam bot watches; empty for everyone else.
    pub trigger_tags: Vec<String>,
    /// Purchased accounts that never act.
    pub passive: bool,
}

impl Agent {
    pub fn interest(&self, topic: &str) -> f64 {
        self.interests.get(topic).copied().unwrap_or(0.0)
    }

    pub fn is_topic_specific(&self) -> bool {
        self.interests.values().any(|&a| a >= TOPIC_FOCUS_AFFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FollowerEntry {
    pub purchased: bool,
    pub since: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FollowingEntry {
    pub since: SimTime,
    pub unfollow_at: Option<SimTime>,
}

/// Grouping of a honeypot by the image-generation class of its strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StrategyGroup {
    AI,
    NonAI,
    Mixed,
}

impl StrategyGroup {
    pub fn of(mix: &[GenerationStrategy]) -> StrategyGroup {
        let ai = mix.iter().filter(|s| s.is_ai()).count();
        match ai {
            0 => StrategyGroup::NonAI,
            n if n == mix.len() => StrategyGroup::AI,
            _ => StrategyGroup::Mixed,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StrategyGroup::AI => "AI",
            StrategyGroup::NonAI => "NonAI",
            StrategyGroup::Mixed => "Mixed",
        }
    }
}

/// A honeypot page and everything it accumulated during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Honeypot {
    pub id: String,
    pub topic: Arc<Topic>,
    pub strategy_mix: Vec<GenerationStrategy>,
    pub plan: EngagementPlanConfig,
    pub followers: BTreeMap<AgentId, FollowerEntry>,
    pub followings: BTreeMap<AgentId, FollowingEntry>,
    pub posts: Vec<Post>,
    pub daily_snapshots: Vec<MetricsSnapshot>,
}

impl Honeypot {
    pub fn new(
        id: impl Into<String>,
        topic: Arc<Topic>,
        strategy_mix: Vec<GenerationStrategy>,
        plan: EngagementPlanConfig,
    ) -> Self {
        Honeypot {
            id: id.into(),
            topic,
            strategy_mix,
            plan,
            followers: BTreeMap::new(),
            followings: BTreeMap::new(),
            posts: Vec::new(),
            daily_snapshots: Vec::new(),
        }
    }

    pub fn purchased_follower_count(&self) -> usize {
        self.followers.values().filter(|f| f.purchased).count()
    }

    /// Followers that count for analytics (purchased ones excluded).
    pub fn analytic_follower_count(&self) -> usize {
        self.followers.len() - self.purchased_follower_count()
    }

    pub fn strategy_group(&self) -> StrategyGroup {
        StrategyGroup::of(&self.strategy_mix)
    }

    pub fn latest_post_before(&self, now: SimTime) -> Option<&Post> {
        self.posts.iter().rev().find(|p| p.published_at <= now)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SponsoredWindow {
    pub start: SimTime,
    pub end: SimTime,
    pub daily_budget: f64,
}

impl SponsoredWindow {
    pub fn contains(&self, t: SimTime) -> bool {
        self.start <= t && t < self.end
    }

    pub fn days(&self) -> u32 {
        self.end.day - self.start.day
    }

    pub fn total_cost(&self) -> f64 {
        self.daily_budget * f64::from(self.days())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: PostId,
    pub author: String,
    pub published_at: SimTime,
    pub content: ContentDescriptor,
    pub sponsored_window: Option<SponsoredWindow>,
    pub likes: u32,
    pub comments: Vec<Comment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comment {
    pub author: AgentId,
    pub text: String,
    pub posted_at: SimTime,
    /// Seconds between the post's publication and this comment.
    pub latency_seconds: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Like,
    Comment,
    Follow,
    Unfollow,
    FollowBack,
    PurchasedFollow,
    SponsoredImpression,
}

impl EventKind {
    pub const ALL: [EventKind; 7] = [
        EventKind::Like,
        EventKind::Comment,
        EventKind::Follow,
        EventKind::Unfollow,
        EventKind::FollowBack,
        EventKind::PurchasedFollow,
        EventKind::SponsoredImpression,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EventKind::Like => "Like",
            EventKind::Comment => "Comment",
            EventKind::Follow => "Follow",
            EventKind::Unfollow => "Unfollow",
            EventKind::FollowBack => "FollowBack",
            EventKind::PurchasedFollow => "PurchasedFollow",
            EventKind::SponsoredImpression => "SponsoredImpression",
        }
    }
}

impl FromStr for EventKind {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| DomainError::UnknownName { what: "event kind", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Entity {
    Agent(AgentId),
    Honeypot(HoneypotRef),
    Post(PostId),
}

/// One entry of the append-only event log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementEvent {
    pub seq: u64,
    pub kind: EventKind,
    pub actor: Entity,
    pub target: Entity,
    pub at: SimTime,
    /// The honeypot this event concerns.
    pub honeypot: HoneypotRef,
}
