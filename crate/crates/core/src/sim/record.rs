use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{Agent, AgentId, EngagementEvent, Entity, EventKind, Honeypot, HoneypotRef, PostId};

/// Everything one replicate produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Hex SHA-256 of the run spec.
    pub config_hash: String,
    pub horizon_days: u32,
    pub honeypots: Vec<Honeypot>,
    pub agents: Vec<Agent>,
    /// Append-only log; `seq` equals the index.
    pub events: Vec<EngagementEvent>,
}

pub const EVENT_COLUMNS: [&str; 7] = ["seq", "day", "minute", "kind", "actor", "target", "honeypot"];
pub const SNAPSHOT_COLUMNS: [&str; 5] = ["honeypot", "day", "followers", "cum_likes", "cum_comments"];
pub const POST_COLUMNS: [&str; 13] = [
    "honeypot",
    "post",
    "day",
    "minute",
    "strategy",
    "appeal",
    "cta",
    "emoji_count",
    "likes",
    "comments",
    "sponsored_start",
    "sponsored_days",
    "daily_budget",
];
pub const COMMENT_COLUMNS: [&str; 6] = ["honeypot", "post", "author", "day", "minute", "latency_seconds"];
pub const FOLLOWER_COLUMNS: [&str; 14] = [
    "honeypot",
    "agent",
    "purchased",
    "since_day",
    "category",
    "gender",
    "age",
    "region",
    "follower_count",
    "following_count",
    "post_count",
    "has_real_picture",
    "username_entropy",
    "topic_specific",
];

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

impl RunRecord {
    pub fn honeypot_id(&self, h: HoneypotRef) -> &str {
        &self.honeypots[usize::from(h.0)].id
    }

    fn entity(&self, e: Entity) -> String {
        match e {
            Entity::Agent(a) => a.to_string(),
            Entity::Honeypot(h) => self.honeypot_id(h).to_string(),
            Entity::Post(p) => p.to_string(),
        }
    }

    /// Columns: seq, day, minute, kind, actor, target, honeypot.
    pub fn events_csv(&self) -> String {
        csv_string(
            &EVENT_COLUMNS,
            self.events.iter().map(|e| {
                vec![
                    e.seq.to_string(),
                    e.at.day.to_string(),
                    e.at.minute_of_day.to_string(),
                    e.kind.label().to_string(),
                    self.entity(e.actor),
                    self.entity(e.target),
                    self.honeypot_id(e.honeypot).to_string(),
                ]
            }),
        )
    }

    /// Columns: honeypot, day, followers, cum_likes, cum_comments.
    pub fn snapshot_csv(&self, h: usize) -> String {
        let hp = &self.honeypots[h];
        csv_string(
            &SNAPSHOT_COLUMNS,
            hp.daily_snapshots.iter().map(|s| {
                vec![
                    hp.id.clone(),
                    s.day.to_string(),
                    s.followers_analytic.to_string(),
                    s.cumulative_likes.to_string(),
                    s.cumulative_comments.to_string(),
                ]
            }),
        )
    }

    /// Final per-post state of every honeypot, in publication order.
    pub fn posts_csv(&self) -> String {
        let rows = self.honeypots.iter().flat_map(|hp| {
            hp.posts.iter().map(move |p| {
                let w = p.sponsored_window;
                vec![
                    hp.id.clone(),
                    p.id.to_string(),
                    p.published_at.day.to_string(),
                    p.published_at.minute_of_day.to_string(),
                    format!("{:?}", p.content.provenance),
                    format!("{:.6}", p.content.appeal),
                    p.content.caption.cta.is_some().to_string(),
                    p.content.caption.emoji_count.to_string(),
                    p.likes.to_string(),
                    p.comments.len().to_string(),
                    w.map(|w| w.start.day.to_string()).unwrap_or_default(),
                    w.map(|w| w.days().to_string()).unwrap_or_default(),
                    w.map(|w| w.daily_budget.to_string()).unwrap_or_default(),
                ]
            })
        });
        csv_string(&POST_COLUMNS, rows)
    }

    /// Every comment received, with its text in a trailing column.
    pub fn comments_csv(&self) -> String {
        let mut header = COMMENT_COLUMNS.to_vec();
        header.push("text");
        let rows = self.honeypots.iter().flat_map(|hp| {
            hp.posts.iter().flat_map(move |p| {
                p.comments.iter().map(move |c| {
                    vec![
                        hp.id.clone(),
                        p.id.to_string(),
                        c.author.to_string(),
                        c.posted_at.day.to_string(),
                        c.posted_at.minute_of_day.to_string(),
                        c.latency_seconds.to_string(),
                        c.text.clone(),
                    ]
                })
            })
        });
        csv_string(&header, rows)
    }

    /// Final followers of every honeypot with the profile fields the
    /// classifiers and audience insights read.
    pub fn followers_csv(&self) -> String {
        let rows = self.honeypots.iter().flat_map(|hp| {
            hp.followers.iter().map(move |(id, f)| {
                let a = &self.agents[id.0 as usize];
                vec![
                    hp.id.clone(),
                    id.to_string(),
                    f.purchased.to_string(),
                    f.since.day.to_string(),
                    format!("{:?}", a.category),
                    a.gender.label().to_string(),
                    a.age_bucket.label().to_string(),
                    a.region.clone(),
                    a.follower_count.to_string(),
                    a.following_count.to_string(),
                    a.post_count.to_string(),
                    a.has_real_picture.to_string(),
                    format!("{:.6}", a.username_entropy),
                    a.is_topic_specific().to_string(),
                ]
            })
        });
        csv_string(&FOLLOWER_COLUMNS, rows)
    }

    /// Hex SHA-256 over the event log and every snapshot CSV.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.events_csv().as_bytes());
        for i in 0..self.honeypots.len() {
            h.update(self.snapshot_csv(i).as_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Folds the event log from an empty network, calling `visit` after each event.
    pub fn replay_with(&self, mut visit: impl FnMut(&ReplayState, &EngagementEvent)) -> ReplayState {
        let mut state = ReplayState::new(self.honeypots.len());
        for e in &self.events {
            state.apply(e);
            visit(&state, e);
        }
        state
    }

    pub fn replay(&self) -> ReplayState {
        self.replay_with(|_, _| {})
    }
}

/// Network state rebuilt from events alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayState {
    pub likes: BTreeMap<PostId, u32>,
    pub comments: BTreeMap<PostId, u32>,
    /// Non-purchased followers per honeypot.
    pub followers: Vec<BTreeSet<AgentId>>,
    pub purchased: Vec<BTreeSet<AgentId>>,
    pub followings: Vec<BTreeSet<AgentId>>,
    pub impressions: BTreeMap<PostId, u32>,
}

impl ReplayState {
    pub fn new(honeypots: usize) -> Self {
        ReplayState {
            followers: vec![BTreeSet::new(); honeypots],
            purchased: vec![BTreeSet::new(); honeypots],
            followings: vec![BTreeSet::new(); honeypots],
            ..ReplayState::default()
        }
    }

    /// Applies one event. Likes and comments count only when an agent acts on
    /// a post; the honeypot's own spam on other posts is skipped.
    pub fn apply(&mut self, e: &EngagementEvent) {
        let h = usize::from(e.honeypot.0);
        match (e.kind, e.actor, e.target) {
            (EventKind::Like, Entity::Agent(_), Entity::Post(p)) => *self.likes.entry(p).or_default() += 1,
            (EventKind::Comment, Entity::Agent(_), Entity::Post(p)) => *self.comments.entry(p).or_default() += 1,
            (EventKind::Follow, Entity::Agent(a), Entity::Honeypot(_)) => {
                self.followers[h].insert(a);
            }
            (EventKind::Follow | EventKind::FollowBack, Entity::Honeypot(_), Entity::Agent(a)) => {
                self.followings[h].insert(a);
            }
            (EventKind::Unfollow, Entity::Honeypot(_), Entity::Agent(a)) => {
                self.followings[h].remove(&a);
            }
            (EventKind::Unfollow, Entity::Agent(a), Entity::Honeypot(_)) => {
                self.followers[h].remove(&a);
            }
            (EventKind::PurchasedFollow, _, Entity::Agent(a)) => {
                self.purchased[h].insert(a);
            }
            (EventKind::SponsoredImpression, _, Entity::Post(p)) => *self.impressions.entry(p).or_default() += 1,
            _ => {}
        }
    }
}
