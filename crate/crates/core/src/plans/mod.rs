//! Engagement plans: what a honeypot does to the network each day.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Agent, AgentId, FollowerEntry, Honeypot, Post, PostId, SponsoredWindow};
use crate::time::SimTime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("empty {0} pool")]
    EmptyPool(&'static str),
    #[error("only {available} passive accounts left, {requested} requested")]
    InsufficientPool { requested: usize, available: usize },
    #[error("post {0} is already sponsored")]
    AlreadySponsored(PostId),
    #[error("honeypot `{0}` does not run PLAN 2")]
    WrongPlan(String),
    #[error("post {0} does not belong to the honeypot")]
    UnknownPost(PostId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Plan {
    Plan0,
    Plan1,
    Plan2,
}

impl Plan {
    pub const ALL: [Plan; 3] = [Plan::Plan0, Plan::Plan1, Plan::Plan2];

    pub fn label(self) -> &'static str {
        match self {
            Plan::Plan0 => "Plan0",
            Plan::Plan1 => "Plan1",
            Plan::Plan2 => "Plan2",
        }
    }

    pub fn spams(self) -> bool {
        self != Plan::Plan0
    }

    pub fn follows_back(self) -> bool {
        self != Plan::Plan0
    }

    pub fn follows_and_unfollows(self) -> bool {
        self == Plan::Plan1
    }

    pub fn pays(self) -> bool {
        self == Plan::Plan2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngagementPlanConfig {
    pub plan: Plan,
    pub follow_back_p: f64,
    pub purchased_followers_n: u32,
    pub sponsor_daily_budget: f64,
    pub sponsor_duration_days: u32,
    pub sponsored_posts: u32,
    pub fu_unfollow_delay_days: u32,
    pub fu_daily_follows: u32,
    pub aggressive_start_week: u32,
}

impl Default for EngagementPlanConfig {
    fn default() -> Self {
        EngagementPlanConfig::new(Plan::Plan0)
    }
}

impl EngagementPlanConfig {
    pub fn new(plan: Plan) -> Self {
        EngagementPlanConfig {
            plan,
            follow_back_p: 0.5,
            purchased_followers_n: 100,
            sponsor_daily_budget: 2.0,
            sponsor_duration_days: 7,
            sponsored_posts: 2,
            fu_unfollow_delay_days: 2,
            fu_daily_follows: 10,
            aggressive_start_week: 9,
        }
    }

    /// First day of the aggressive phase (week 9 starts on day 56).
    pub fn aggressive_start_day(&self) -> u32 {
        self.aggressive_start_week.saturating_sub(1) * 7
    }

    pub fn is_aggressive(&self, day: u32) -> bool {
        day >= self.aggressive_start_day()
    }

    /// Names of the fields that are out of range.
    pub fn invalid_fields(&self) -> Vec<&'static str> {
        let mut bad = Vec::new();
        if !(0.0..=1.0).contains(&self.follow_back_p) {
            bad.push("follow_back_p");
        }
        if !(self.sponsor_daily_budget >= 0.0 && self.sponsor_daily_budget.is_finite()) {
            bad.push("sponsor_daily_budget");
        }
        if self.aggressive_start_week == 0 {
            bad.push("aggressive_start_week");
        }
        bad
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlanActionKind {
    LikeTop25,
    CommentTop25,
    FollowBack,
    ProactiveFollow,
    Unfollow,
    BuyFollowers,
    SponsorPost,
    ReplyToComment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionTarget {
    Post(PostId),
    Agent(AgentId),
    /// A comment on one of the honeypot's own posts.
    Comment { post: PostId, index: usize },
    Count(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanAction {
    pub kind: PlanActionKind,
    pub target: ActionTarget,
    pub at: SimTime,
}

/// Spamming happens in one session between 10:00 and 22:00.
const SPAM_WINDOW: (u32, u32) = (10 * 60, 22 * 60);
/// Owner replies are written in the evening.
const REPLY_WINDOW: (u32, u32) = (18 * 60, 23 * 60);

/// Fixed-time actions of one honeypot for `day`.
///
/// `feed` is the current top 25 of the topic's main hashtag, without the
/// honeypot's own posts. Replies cover every comment received the day before.
/// Follow-backs and Follow & Unfollow depend on live state and come from
/// [`follow_back_decision`] and [`fu_step`].
pub fn plan_daily_actions<R: Rng + ?Sized>(
    h: &Honeypot,
    day: u32,
    feed: &[PostId],
    rng: &mut R,
) -> Vec<PlanAction> {
    let cfg = &h.plan;
    let mut actions = Vec::new();

    for post in &h.posts {
        for (index, c) in post.comments.iter().enumerate() {
            if c.posted_at.day + 1 == day {
                let minute = rng.random_range(REPLY_WINDOW.0..REPLY_WINDOW.1);
                actions.push(PlanAction {
                    kind: PlanActionKind::ReplyToComment,
                    target: ActionTarget::Comment { post: post.id, index },
                    at: SimTime::new(day, minute),
                });
            }
        }
    }

    if cfg.plan.pays() && day == 0 {
        actions.push(PlanAction {
            kind: PlanActionKind::BuyFollowers,
            target: ActionTarget::Count(cfg.purchased_followers_n),
            at: SimTime::start_of_day(0),
        });
    }

    if cfg.plan.spams() {
        let start = rng.random_range(SPAM_WINDOW.0..SPAM_WINDOW.1);
        for (i, &p) in feed.iter().take(25).enumerate() {
            let at = SimTime::new(day, (start + i as u32).min(SimTime::LAST_MINUTE));
            actions.push(PlanAction { kind: PlanActionKind::LikeTop25, target: ActionTarget::Post(p), at });
            actions.push(PlanAction { kind: PlanActionKind::CommentTop25, target: ActionTarget::Post(p), at });
        }
    }

    if cfg.plan.pays() && day == cfg.aggressive_start_day() {
        for p in top_posts_by_likes(&h.posts, cfg.sponsored_posts as usize) {
            actions.push(PlanAction {
                kind: PlanActionKind::SponsorPost,
                target: ActionTarget::Post(p),
                at: SimTime::start_of_day(day),
            });
        }
    }

    actions.sort_by_key(|a| a.at);
    actions
}

/// The `n` posts with most likes; ties go to the earlier publication.
pub fn top_posts_by_likes(posts: &[Post], n: usize) -> Vec<PostId> {
    let mut ranked: Vec<&Post> = posts.iter().collect();
    ranked.sort_by(|a, b| {
        b.likes.cmp(&a.likes).then(a.published_at.cmp(&b.published_at)).then(a.id.cmp(&b.id))
    });
    ranked.into_iter().take(n).map(|p| p.id).collect()
}

pub fn spam_comment_text<'a, R: Rng + ?Sized>(pool: &'a [String], rng: &mut R) -> Result<&'a str, PlanError> {
    pool.choose(rng).map(String::as_str).ok_or(PlanError::EmptyPool("spam comment"))
}

pub fn follow_back_decision<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

/// Strict balance: one more following must stay below the non-purchased
/// follower count (and below 1 when there are none).
pub fn balance_allows_follow(followings: usize, analytic_followers: usize) -> bool {
    followings + 1 < analytic_followers.max(1)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FuStep {
    pub unfollows: Vec<AgentId>,
    /// New followings with their scheduled unfollow time.
    pub follows: Vec<(AgentId, SimTime)>,
}

/// One Follow & Unfollow round at `now`.
///
/// Due unfollows come first. Candidates already followed or already
/// following the honeypot are skipped; the rest are followed in random order
/// while the balance holds, at most `fu_daily_follows` of them.
pub fn fu_step<R: Rng + ?Sized>(
    h: &Honeypot,
    now: SimTime,
    candidates: &[AgentId],
    rng: &mut R,
) -> FuStep {
    let cfg = &h.plan;
    let unfollows: Vec<AgentId> = h
        .followings
        .iter()
        .filter(|(_, f)| f.unfollow_at.is_some_and(|t| t <= now))
        .map(|(&a, _)| a)
        .collect();
    let mut followings = h.followings.len() - unfollows.len();
    let analytic = h.analytic_follower_count();

    let mut pool: Vec<AgentId> = candidates
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|a| !h.followings.contains_key(a) && !h.followers.contains_key(a))
        .collect();
    pool.shuffle(rng);

    let unfollow_at = now.plus_days(cfg.fu_unfollow_delay_days);
    let mut follows = Vec::new();
    for a in pool {
        if follows.len() as u32 >= cfg.fu_daily_follows || !balance_allows_follow(followings, analytic) {
            break;
        }
        follows.push((a, unfollow_at));
        followings += 1;
    }
    FuStep { unfollows, follows }
}

/// Adds `n` passive accounts as purchased followers.
///
/// `population` is scanned for passive agents that follow nobody yet; `taken`
/// marks accounts already sold to another honeypot and is updated.
pub fn buy_followers(
    h: &mut Honeypot,
    n: usize,
    population: &[Agent],
    taken: &mut BTreeSet<AgentId>,
    at: SimTime,
) -> Result<Vec<AgentId>, PlanError> {
    let available: Vec<AgentId> = population
        .iter()
        .filter(|a| a.passive && !taken.contains(&a.id) && !h.followers.contains_key(&a.id))
        .map(|a| a.id)
        .collect();
    if available.len() < n {
        return Err(PlanError::InsufficientPool { requested: n, available: available.len() });
    }
    let bought: Vec<AgentId> = available.into_iter().take(n).collect();
    for &a in &bought {
        taken.insert(a);
        h.followers.insert(a, FollowerEntry { purchased: true, since: at });
    }
    Ok(bought)
}

/// Opens a sponsorship window on `post` of honeypot `h`.
pub fn sponsor_post(h: &mut Honeypot, post: PostId, start: SimTime) -> Result<SponsoredWindow, PlanError> {
    if !h.plan.plan.pays() {
        return Err(PlanError::WrongPlan(h.id.clone()));
    }
    let cfg = h.plan;
    let p = h
        .posts
        .iter_mut()
        .find(|p| p.id == post)
        .ok_or(PlanError::UnknownPost(post))?;
    if p.sponsored_window.is_some() {
        return Err(PlanError::AlreadySponsored(post));
    }
    let window = SponsoredWindow {
        start,
        end: start.plus_days(cfg.sponsor_duration_days),
        daily_budget: cfg.sponsor_daily_budget,
    };
    p.sponsored_window = Some(window);
    Ok(window)
}
