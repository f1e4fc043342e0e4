use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::sync::Arc;

use log::{debug, warn};
use rand::distr::weighted::WeightedIndex;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Poisson};

use super::audience::{deliver_sponsorship, AudienceSample, SponsorAudienceModel};
use super::feed::{BackgroundPost, FeedCandidate, TagFeed};
use super::population::{generate_passive, generate_population, sponsored_viewer};
use super::react::{agent_react, react_with_affinity, spambot_react, Exposure};
use super::record::RunRecord;
use super::schedule::schedule_posts;
use super::{MetricsSnapshot, PostMetrics, RunSpec, SimError};
use crate::content::{
    generate_post, owner_review, ContentError, GenerationStrategy, PostDraft, ReviewOutcome, StubEnvironment,
    DEFAULT_REVIEW_RETRIES,
};
use crate::domain::{
    Agent, AgentCategory, AgentId, Comment, EngagementEvent, Entity, EventKind, FollowerEntry, FollowingEntry,
    Honeypot, HoneypotRef, Post, PostId, Topic,
};
use crate::fixtures::Fixtures;
use crate::plans::{
    balance_allows_follow, buy_followers, follow_back_decision, fu_step, plan_daily_actions, spam_comment_text,
    sponsor_post, ActionTarget, PlanAction, PlanActionKind,
};
use crate::rng::{derive_seed, split, SimRng};
use crate::time::{SimTime, MINUTES_PER_DAY};

/// Honeypot posts older than this never reach a feed again.
const FEED_MAX_AGE_DAYS: u32 = 21;
const REFRESH_MINUTES: u32 = 6 * 60;
const WINDOWS_PER_DAY: u32 = MINUTES_PER_DAY / REFRESH_MINUTES;
/// Days of main-hashtag browsing remembered as Follow & Unfollow candidates.
const FU_LOOKBACK_DAYS: u32 = 7;
const FOLLOWER_VIEW_DELAY_MEAN: f64 = 180.0;
const FU_TICK_MINUTE: u32 = 12 * 60;

#[derive(Debug, Clone)]
enum Action {
    DayStart,
    Refresh { window: u32 },
    Publish { h: u16 },
    Plan { h: u16, action: PlanAction },
    BotComment { h: u16, post: u32, bot: AgentId, text: String, latency: u32 },
    Session { agent: AgentId, tag: u32 },
    FollowerView { agent: AgentId, h: u16, post: u32 },
    Visit { agent: AgentId, h: u16 },
    FollowResponse { agent: AgentId, h: u16 },
    FuTick { h: u16 },
    SponsorDay { h: u16, post: u32 },
    Impression { h: u16, post: u32, viewer: AudienceSample },
    Snapshot,
}

impl Action {
    /// Same-minute order: day start, feed refresh, everything else, snapshot.
    fn class(&self) -> u8 {
        match self {
            Action::DayStart | Action::SponsorDay { .. } => 0,
            Action::Refresh { .. } => 1,
            Action::Snapshot => 3,
            _ => 2,
        }
    }
}

#[derive(Debug)]
struct Scheduled {
    at: SimTime,
    class: u8,
    seq: u64,
    action: Action,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Scheduled {}
impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.at, self.class, self.seq).cmp(&(other.at, other.class, other.seq))
    }
}

struct TagState {
    name: String,
    topic: usize,
    coverage: u64,
    browse_share: f64,
    feed: TagFeed,
    /// Honeypot posts carrying this tag, oldest first.
    honeypot_posts: Vec<(u16, u32)>,
}

struct TopicAudiencePool {
    members: Vec<AgentId>,
    index: Option<WeightedIndex<f64>>,
    /// Expected browse sessions per day over all members.
    sessions_per_day: f64,
}

impl TopicAudiencePool {
    fn sample(&self, rng: &mut SimRng) -> Option<AgentId> {
        self.index.as_ref().map(|w| self.members[w.sample(rng)])
    }
}

#[derive(Default)]
struct PostState {
    likers: BTreeSet<AgentId>,
    commenters: BTreeSet<AgentId>,
}

struct HoneypotRng {
    content: SimRng,
    schedule: SimRng,
    plan: SimRng,
}

struct Engine<'f> {
    spec: &'f RunSpec,
    fixtures: &'f Fixtures,
    seed: u64,
    end: SimTime,
    now: SimTime,
    queue: BinaryHeap<Reverse<Scheduled>>,
    next_seq: u64,
    events: Vec<EngagementEvent>,
    honeypots: Vec<Honeypot>,
    post_state: Vec<Vec<PostState>>,
    post_index: HashMap<PostId, (u16, u32)>,
    next_post_id: u64,
    agents: Vec<Agent>,
    topics: Vec<Arc<Topic>>,
    topic_of_honeypot: Vec<usize>,
    tags: Vec<TagState>,
    tag_index: BTreeMap<String, u32>,
    audiences: Vec<TopicAudiencePool>,
    bots_by_tag: BTreeMap<String, Vec<AgentId>>,
    background_author: HashMap<PostId, AgentId>,
    main_browsers: Vec<Vec<(u32, AgentId)>>,
    sold: BTreeSet<AgentId>,
    /// Purchased followers per honeypot.
    purchased: Vec<usize>,
    env: StubEnvironment<'f>,
    sponsor_model: SponsorAudienceModel,
    rng: SimRng,
    background_rng: SimRng,
    honeypot_rng: Vec<HoneypotRng>,
}

/// Runs one replicate of `spec` and returns its full record.
pub fn run(spec: &RunSpec, seed: u64) -> Result<RunRecord, SimError> {
    spec.validate()?;
    let fixtures = Fixtures::builtin();
    let mut engine = Engine::new(spec, fixtures, seed)?;
    engine.run()?;
    Ok(engine.into_record())
}

impl<'f> Engine<'f> {
    fn new(spec: &'f RunSpec, fixtures: &'f Fixtures, seed: u64) -> Result<Self, SimError> {
        let profile = &spec.profile;

        let mut topics: Vec<Arc<Topic>> = fixtures.topics.clone();
        for h in &spec.honeypots {
            if !topics.iter().any(|t| t.name == h.topic.name) {
                topics.push(h.topic.clone());
            }
        }
        let topic_pos = |name: &str| topics.iter().position(|t| t.name == name).expect("topic registered");
        let topic_of_honeypot: Vec<usize> = spec.honeypots.iter().map(|h| topic_pos(&h.topic.name)).collect();

        let mut agents = generate_population(spec.population_size, profile, &topics, &mut split(seed, "population"));
        let to_sell: usize = spec
            .honeypots
            .iter()
            .filter(|h| h.plan.plan.pays())
            .map(|h| h.plan.purchased_followers_n as usize)
            .sum();
        let first_passive = agents.len() as u32;
        agents.extend(generate_passive(first_passive, to_sell, &mut split(seed, "passive")));

        let mut tags = Vec::new();
        let mut tag_index = BTreeMap::new();
        for (ti, t) in topics.iter().enumerate() {
            let total: f64 =
                t.hashtag_pool.iter().map(|h| (h.coverage_count as f64).powf(profile.tag_browse_exponent)).sum();
            for h in &t.hashtag_pool {
                if tag_index.contains_key(&h.tag) {
                    continue;
                }
                tag_index.insert(h.tag.clone(), tags.len() as u32);
                tags.push(TagState {
                    name: h.tag.clone(),
                    topic: ti,
                    coverage: h.coverage_count,
                    browse_share: (h.coverage_count as f64).powf(profile.tag_browse_exponent) / total,
                    feed: TagFeed::default(),
                    honeypot_posts: Vec::new(),
                });
            }
        }

        let audiences = topics
            .iter()
            .map(|t| {
                let members: Vec<AgentId> = agents
                    .iter()
                    .filter(|a| !a.passive && a.category != AgentCategory::SpamBot && a.interest(&t.name) > 0.0)
                    .filter(|a| a.activity_rate > 0.0)
                    .map(|a| a.id)
                    .collect();
                let weights: Vec<f64> = members.iter().map(|id| agents[id.0 as usize].activity_rate).collect();
                TopicAudiencePool {
                    sessions_per_day: weights.iter().sum(),
                    index: WeightedIndex::new(&weights).ok(),
                    members,
                }
            })
            .collect();

        let mut bots_by_tag: BTreeMap<String, Vec<AgentId>> = BTreeMap::new();
        for a in agents.iter().filter(|a| a.category == AgentCategory::SpamBot && !a.passive) {
            for t in &a.trigger_tags {
                bots_by_tag.entry(t.clone()).or_default().push(a.id);
            }
        }

        let honeypots: Vec<Honeypot> = spec
            .honeypots
            .iter()
            .map(|h| Honeypot::new(h.id.clone(), h.topic.clone(), h.strategy_mix.clone(), h.plan))
            .collect();
        let honeypot_rng = spec
            .honeypots
            .iter()
            .map(|h| HoneypotRng {
                content: split(seed, &format!("honeypot/{}/content", h.id)),
                schedule: split(seed, &format!("honeypot/{}/schedule", h.id)),
                plan: split(seed, &format!("honeypot/{}/plan", h.id)),
            })
            .collect();

        let sponsor_model =
            SponsorAudienceModel::from_table(&fixtures.sponsored_audience, profile.sponsor_reach_cv)?;

        Ok(Engine {
            spec,
            fixtures,
            seed,
            end: SimTime::start_of_day(spec.horizon_days),
            now: SimTime::ZERO,
            queue: BinaryHeap::new(),
            next_seq: 0,
            events: Vec::new(),
            post_state: (0..honeypots.len()).map(|_| Vec::new()).collect(),
            honeypots,
            post_index: HashMap::new(),
            next_post_id: 0,
            agents,
            main_browsers: vec![Vec::new(); topics.len()],
            topics,
            topic_of_honeypot,
            tags,
            tag_index,
            audiences,
            bots_by_tag,
            background_author: HashMap::new(),
            sold: BTreeSet::new(),
            purchased: vec![0; spec.honeypots.len()],
            env: StubEnvironment::new(fixtures, profile.appeal),
            sponsor_model,
            rng: split(seed, "exposure"),
            background_rng: split(seed, "background"),
            honeypot_rng,
        })
    }

    fn schedule(&mut self, at: SimTime, action: Action) {
        if at >= self.end {
            return;
        }
        debug_assert!(at >= self.now, "scheduling into the past");
        let s = Scheduled { at, class: action.class(), seq: self.next_seq, action };
        self.next_seq += 1;
        self.queue.push(Reverse(s));
    }

    fn log(&mut self, kind: EventKind, actor: Entity, target: Entity, h: u16) {
        self.events.push(EngagementEvent {
            seq: self.events.len() as u64,
            kind,
            actor,
            target,
            at: self.now,
            honeypot: HoneypotRef(h),
        });
    }

    fn run(&mut self) -> Result<(), SimError> {
        for day in 0..self.spec.horizon_days {
            self.schedule(SimTime::start_of_day(day), Action::DayStart);
            for window in 0..WINDOWS_PER_DAY {
                self.schedule(SimTime::new(day, window * REFRESH_MINUTES), Action::Refresh { window });
            }
            self.schedule(SimTime::end_of_day(day), Action::Snapshot);
        }
        while let Some(Reverse(s)) = self.queue.pop() {
            self.now = s.at;
            self.dispatch(s.action)?;
        }
        Ok(())
    }

    fn dispatch(&mut self, action: Action) -> Result<(), SimError> {
        match action {
            Action::DayStart => self.day_start(),
            Action::Refresh { window } => self.refresh(window),
            Action::Publish { h } => self.publish(h)?,
            Action::Plan { h, action } => self.plan_action(h, action)?,
            Action::BotComment { h, post, bot, text, latency } => self.bot_comment(h, post, bot, text, latency),
            Action::Session { agent, tag } => self.session(agent, tag),
            Action::FollowerView { agent, h, post } => self.view(agent, h, post, Exposure::FEED),
            Action::Visit { agent, h } => self.visit(agent, h),
            Action::FollowResponse { agent, h } => {
                if !self.honeypots[usize::from(h)].followers.contains_key(&agent) {
                    self.agent_follows(agent, h);
                }
            }
            Action::FuTick { h } => self.fu_tick(h),
            Action::SponsorDay { h, post } => self.sponsor_day(h, post)?,
            Action::Impression { h, post, viewer } => self.impression(h, post, viewer),
            Action::Snapshot => self.snapshot(),
        }
        Ok(())
    }

    fn day_start(&mut self) {
        let day = self.now.day;
        let feed_seed = derive_seed(self.seed, &format!("stub-feed/{day}"));
        for t in &self.topics {
            self.env.refresh_feed(t, feed_seed);
        }
        for h in 0..self.honeypots.len() {
            let (t1, t2) = schedule_posts(day, self.spec.schedule, &mut self.honeypot_rng[h].schedule);
            self.schedule(t1, Action::Publish { h: h as u16 });
            self.schedule(t2, Action::Publish { h: h as u16 });

            let main = self.topics[self.topic_of_honeypot[h]].main_hashtag();
            let main_feed: Vec<PostId> = self.tags[self.tag_index[main] as usize]
                .feed
                .current()
                .iter()
                .map(|c| c.id)
                .filter(|id| !self.post_index.contains_key(id))
                .collect();
            let actions = plan_daily_actions(&self.honeypots[h], day, &main_feed, &mut self.honeypot_rng[h].plan);
            for a in actions {
                if a.kind != PlanActionKind::ReplyToComment {
                    self.schedule(a.at, Action::Plan { h: h as u16, action: a });
                }
            }

            let cfg = self.honeypots[h].plan;
            if cfg.plan.follows_and_unfollows() && cfg.is_aggressive(day) {
                self.schedule(SimTime::new(day, FU_TICK_MINUTE), Action::FuTick { h: h as u16 });
            }
        }
    }

    fn poisson(rng: &mut SimRng, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        Poisson::new(mean).expect("positive mean").sample(rng) as u64
    }

    fn background_arrivals(&mut self, tag: usize, from_minute: i64, span_minutes: i64, mean: f64) -> Vec<BackgroundPost> {
        let bg = self.spec.profile.background;
        let n = Self::poisson(&mut self.background_rng, mean);
        let engagement = LogNormal::new(bg.engagement_mu, bg.engagement_sigma.max(1e-9)).expect("valid log-normal");
        let topic = self.tags[tag].topic;
        (0..n)
            .filter_map(|_| {
                let author = self.audiences[topic].sample(&mut self.background_rng)?;
                let score: f64 = engagement.sample(&mut self.background_rng);
                let like_share: f64 = self.background_rng.random_range(0.7..0.95);
                let likes = (score * like_share).round();
                let comments = ((score - likes) / 2.0).max(0.0).round();
                let minute = from_minute + self.background_rng.random_range(0..span_minutes.max(1));
                let id = PostId(self.next_post_id);
                self.next_post_id += 1;
                self.background_author.insert(id, author);
                Some(BackgroundPost {
                    post: FeedCandidate { id, likes: likes as u32, comments: comments as u32, published_minute: minute },
                    author,
                })
            })
            .collect()
    }

    fn refresh(&mut self, window: u32) {
        let now = self.now;
        let now_min = now.total_minutes() as i64;
        let bg = self.spec.profile.background;
        let day_fraction = f64::from(REFRESH_MINUTES) / f64::from(MINUTES_PER_DAY);
        let first = now == SimTime::ZERO;
        let fu_topics: BTreeSet<usize> = (0..self.honeypots.len())
            .filter(|&h| {
                let cfg = self.honeypots[h].plan;
                cfg.plan.follows_and_unfollows() && now.day + FU_LOOKBACK_DAYS >= cfg.aggressive_start_day()
            })
            .map(|h| self.topic_of_honeypot[h])
            .collect();

        for tag in 0..self.tags.len() {
            let daily = bg.rate_per_100m * self.tags[tag].coverage as f64 / 1e8;
            let arrivals = if first {
                let span = i64::from(bg.warmup_days) * i64::from(MINUTES_PER_DAY);
                self.background_arrivals(tag, -span, span, daily * f64::from(bg.warmup_days))
            } else {
                let span = i64::from(REFRESH_MINUTES);
                self.background_arrivals(tag, now_min - span, span, daily * day_fraction)
            };
            self.tags[tag].feed.add_background(arrivals, now);

            let honeypots = &self.honeypots;
            let state = &mut self.tags[tag];
            state.honeypot_posts.retain(|&(h, p)| {
                now.day.saturating_sub(honeypots[usize::from(h)].posts[p as usize].published_at.day) <= FEED_MAX_AGE_DAYS
            });
            let candidates: Vec<FeedCandidate> = state
                .honeypot_posts
                .iter()
                .map(|&(h, p)| {
                    let post = &honeypots[usize::from(h)].posts[p as usize];
                    FeedCandidate::new(post.id, post.likes, post.comments.len() as u32, post.published_at)
                })
                .collect();
            state.feed.refresh(&candidates, now);

            let topic = state.topic;
            let has_honeypot = state.feed.current().iter().any(|c| self.post_index.contains_key(&c.id));
            let is_main = self.topics[topic].main_hashtag() == state.name;
            let track = is_main && fu_topics.contains(&topic);
            if !has_honeypot && !track {
                continue;
            }
            let mean = self.audiences[topic].sessions_per_day * state.browse_share * day_fraction;
            let n = Self::poisson(&mut self.rng, mean);
            for _ in 0..n {
                let Some(agent) = self.audiences[topic].sample(&mut self.rng) else { break };
                let minute = window * REFRESH_MINUTES + self.rng.random_range(0..REFRESH_MINUTES);
                if track {
                    self.main_browsers[topic].push((now.day, agent));
                }
                if has_honeypot {
                    self.schedule(SimTime::new(now.day, minute), Action::Session { agent, tag: tag as u32 });
                }
            }
        }
    }

    fn analytic_followers(&self, h: usize) -> usize {
        self.honeypots[h].followers.len() - self.purchased[h]
    }

    fn dilution(&self, h: u16) -> f64 {
        let all = self.honeypots[usize::from(h)].followers.len();
        self.spec.profile.passive_dilution.multiplier(self.analytic_followers(usize::from(h)), all)
    }

    fn draft(&mut self, h: usize) -> Result<PostDraft, ContentError> {
        let hp = &self.honeypots[h];
        let topic = hp.topic.clone();
        let rng = &mut self.honeypot_rng[h].content;
        let first = *hp.strategy_mix.choose(rng).expect("validated non-empty mix");
        let mut order: Vec<GenerationStrategy> = vec![first];
        order.extend(hp.strategy_mix.iter().copied().filter(|&s| s != first));
        let mut last_err = None;
        for s in order {
            match generate_post(s, &topic, &mut self.env, rng) {
                Ok(d) => return Ok(d),
                Err(e @ (ContentError::ExhaustedFeed(_) | ContentError::ExhaustedStockLibrary(_))) => {
                    debug!("honeypot {}: {s:?} unavailable ({e}), falling back", hp.id);
                    last_err = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("at least one strategy tried"))
    }

    fn reviewed_draft(&mut self, h: usize) -> Result<PostDraft, ContentError> {
        let mut draft = self.draft(h)?;
        for attempt in 0..=DEFAULT_REVIEW_RETRIES {
            match owner_review(draft, self.spec.review) {
                ReviewOutcome::Approved(d) => return Ok(d),
                ReviewOutcome::Regenerate(d) if attempt == DEFAULT_REVIEW_RETRIES => {
                    warn!("honeypot {}: review retries exhausted, publishing last draft", self.honeypots[h].id);
                    return Ok(d);
                }
                ReviewOutcome::Regenerate(_) => draft = self.draft(h)?,
            }
        }
        unreachable!("loop returns on the last attempt")
    }

    fn publish(&mut self, h: u16) -> Result<(), SimError> {
        let hi = usize::from(h);
        let draft = self.reviewed_draft(hi)?;
        let id = PostId(self.next_post_id);
        self.next_post_id += 1;
        let idx = self.honeypots[hi].posts.len() as u32;
        for t in &draft.content.caption.hashtags {
            if let Some(&ti) = self.tag_index.get(t) {
                self.tags[ti as usize].honeypot_posts.push((h, idx));
            }
        }
        let post = Post {
            id,
            author: self.honeypots[hi].id.clone(),
            published_at: self.now,
            content: draft.content,
            sponsored_window: None,
            likes: 0,
            comments: Vec::new(),
        };
        self.post_index.insert(id, (h, idx));
        self.post_state[hi].push(PostState::default());

        let profile = &self.spec.profile;
        let mut bots: BTreeSet<AgentId> = BTreeSet::new();
        for tag in &post.content.caption.hashtags {
            if let Some(b) = self.bots_by_tag.get(tag) {
                bots.extend(b.iter().copied());
            }
        }
        let mut pending = Vec::new();
        for bot in bots {
            let agent = &self.agents[bot.0 as usize];
            if let Some(c) =
                spambot_react(agent, &post.content.caption.hashtags, &self.fixtures.spam_bot_templates, profile, &mut self.rng)
            {
                let at = self.now.plus_minutes(u64::from(c.latency_seconds / 60));
                pending.push((at, Action::BotComment { h, post: idx, bot, text: c.text, latency: c.latency_seconds }));
            }
        }

        let delay = Exp::new(1.0 / FOLLOWER_VIEW_DELAY_MEAN).expect("positive rate");
        let viewers: Vec<AgentId> = self.honeypots[hi]
            .followers
            .keys()
            .copied()
            .filter(|a| {
                let a = &self.agents[a.0 as usize];
                !a.passive && a.category != AgentCategory::SpamBot
            })
            .collect();
        for agent in viewers {
            if self.rng.random::<f64>() < profile.follower_view_p {
                let wait: f64 = delay.sample(&mut self.rng);
                pending.push((self.now.plus_minutes(wait.round() as u64), Action::FollowerView { agent, h, post: idx }));
            }
        }
        self.honeypots[hi].posts.push(post);
        for (at, a) in pending {
            self.schedule(at, a);
        }
        Ok(())
    }

    fn bot_comment(&mut self, h: u16, post: u32, bot: AgentId, text: String, latency: u32) {
        let hi = usize::from(h);
        let p = &mut self.honeypots[hi].posts[post as usize];
        p.comments.push(Comment { author: bot, text, posted_at: self.now, latency_seconds: latency });
        let pid = p.id;
        self.post_state[hi][post as usize].commenters.insert(bot);
        self.log(EventKind::Comment, Entity::Agent(bot), Entity::Post(pid), h);
        if !self.honeypots[hi].followers.contains_key(&bot)
            && self.rng.random::<f64>() < self.spec.profile.spambot_follow_p
        {
            self.agent_follows(bot, h);
        }
    }

    fn session(&mut self, agent: AgentId, tag: u32) {
        let shown: Vec<(u16, u32)> = self.tags[tag as usize]
            .feed
            .current()
            .iter()
            .filter_map(|c| self.post_index.get(&c.id).copied())
            .collect();
        for (h, post) in shown {
            let m = self.dilution(h);
            if m >= 1.0 || self.rng.random::<f64>() < m {
                self.view(agent, h, post, Exposure::FEED);
            }
        }
    }

    fn view(&mut self, agent: AgentId, h: u16, post: u32, exposure: Exposure) {
        let hi = usize::from(h);
        let a = &self.agents[agent.0 as usize];
        if a.passive {
            return;
        }
        let hp = &self.honeypots[hi];
        let following = hp.followers.contains_key(&agent);
        let dilution = self.spec.profile.passive_dilution.follow_multiplier(self.analytic_followers(hi), hp.followers.len());
        let r = agent_react(
            a,
            &hp.topic.name,
            &hp.posts[post as usize].content,
            Exposure { follow_boost: exposure.follow_boost * dilution, ..exposure },
            following,
            &self.spec.profile,
            &mut self.rng,
        );
        self.apply_reaction(agent, h, post, r.like, r.comment, r.follow);
    }

    fn apply_reaction(&mut self, agent: AgentId, h: u16, post: u32, like: bool, comment: bool, follow: bool) {
        let hi = usize::from(h);
        let pid = self.honeypots[hi].posts[post as usize].id;
        if like && self.post_state[hi][post as usize].likers.insert(agent) {
            self.honeypots[hi].posts[post as usize].likes += 1;
            self.log(EventKind::Like, Entity::Agent(agent), Entity::Post(pid), h);
        }
        if comment && self.post_state[hi][post as usize].commenters.insert(agent) {
            let text = self.fixtures.legit_comments.choose(&mut self.rng).cloned().unwrap_or_default();
            let p = &mut self.honeypots[hi].posts[post as usize];
            let latency = self.now.minutes_since(p.published_at) * 60;
            p.comments.push(Comment {
                author: agent,
                text,
                posted_at: self.now,
                latency_seconds: latency.min(u64::from(u32::MAX)) as u32,
            });
            self.log(EventKind::Comment, Entity::Agent(agent), Entity::Post(pid), h);
        }
        if follow && !self.honeypots[hi].followers.contains_key(&agent) {
            self.agent_follows(agent, h);
        }
    }

    /// `agent` starts following honeypot `h`; spamming plans may follow back.
    fn agent_follows(&mut self, agent: AgentId, h: u16) {
        let hi = usize::from(h);
        let now = self.now;
        self.honeypots[hi].followers.insert(agent, FollowerEntry { purchased: false, since: now });
        self.log(EventKind::Follow, Entity::Agent(agent), Entity::Honeypot(HoneypotRef(h)), h);

        let hp = &self.honeypots[hi];
        if !hp.plan.plan.follows_back() || hp.followings.contains_key(&agent) {
            return;
        }
        let p = hp.plan.follow_back_p;
        let followings = hp.followings.len();
        if follow_back_decision(&mut self.rng, p) && balance_allows_follow(followings, self.analytic_followers(hi))
        {
            self.honeypots[hi].followings.insert(agent, FollowingEntry { since: now, unfollow_at: None });
            self.log(EventKind::FollowBack, Entity::Honeypot(HoneypotRef(h)), Entity::Agent(agent), h);
        }
    }

    fn visit(&mut self, agent: AgentId, h: u16) {
        let hi = usize::from(h);
        let n = self.spec.profile.visit_posts as usize;
        let now = self.now;
        let posts = &self.honeypots[hi].posts;
        let end = posts.iter().rposition(|p| p.published_at <= now).map_or(0, |i| i + 1);
        let exposure = Exposure { sponsored: false, follow_boost: self.spec.profile.visit_follow_boost };
        for post in (end.saturating_sub(n)..end).rev() {
            self.view(agent, h, post as u32, exposure);
        }
    }

    fn plan_action(&mut self, h: u16, action: PlanAction) -> Result<(), SimError> {
        let hi = usize::from(h);
        let me = Entity::Honeypot(HoneypotRef(h));
        match (action.kind, action.target) {
            (PlanActionKind::LikeTop25, ActionTarget::Post(p)) => {
                self.log(EventKind::Like, me, Entity::Post(p), h);
                self.author_may_visit(h, p);
            }
            (PlanActionKind::CommentTop25, ActionTarget::Post(p)) => {
                spam_comment_text(&self.fixtures.spam_comments, &mut self.rng)?;
                self.log(EventKind::Comment, me, Entity::Post(p), h);
                self.author_may_visit(h, p);
                let m = self.dilution(h);
                let visitors = Self::poisson(&mut self.rng, self.spec.profile.comment_viewer_visits * m);
                let topic = self.topic_of_honeypot[hi];
                for _ in 0..visitors {
                    if let Some(agent) = self.audiences[topic].sample(&mut self.rng) {
                        let wait = self.rng.random_range(5..720);
                        self.schedule(self.now.plus_minutes(wait), Action::Visit { agent, h });
                    }
                }
            }
            (PlanActionKind::BuyFollowers, ActionTarget::Count(n)) => {
                let bought = buy_followers(&mut self.honeypots[hi], n as usize, &self.agents, &mut self.sold, self.now)?;
                self.purchased[hi] += bought.len();
                for a in bought {
                    self.log(EventKind::PurchasedFollow, me, Entity::Agent(a), h);
                }
            }
            (PlanActionKind::SponsorPost, ActionTarget::Post(p)) => {
                let window = sponsor_post(&mut self.honeypots[hi], p, self.now)?;
                let (_, idx) = self.post_index[&p];
                for day in window.start.day..window.end.day {
                    self.schedule(SimTime::start_of_day(day), Action::SponsorDay { h, post: idx });
                }
            }
            (kind, target) => debug!("ignoring plan action {kind:?} on {target:?}"),
        }
        Ok(())
    }

    fn author_may_visit(&mut self, h: u16, post: PostId) {
        let Some(&author) = self.background_author.get(&post) else { return };
        let p = self.spec.profile.author_visit_p * self.dilution(h);
        if self.rng.random::<f64>() < p {
            let wait = self.rng.random_range(5..360);
            self.schedule(self.now.plus_minutes(wait), Action::Visit { agent: author, h });
        }
    }

    fn fu_tick(&mut self, h: u16) {
        let hi = usize::from(h);
        let day = self.now.day;
        let topic = self.topic_of_honeypot[hi];
        self.main_browsers[topic].retain(|&(d, _)| d + FU_LOOKBACK_DAYS >= day);
        let candidates: Vec<AgentId> =
            self.main_browsers[topic].iter().filter(|&&(d, _)| d < day).map(|&(_, a)| a).collect();
        let step = fu_step(&self.honeypots[hi], self.now, &candidates, &mut self.honeypot_rng[hi].plan);
        let me = Entity::Honeypot(HoneypotRef(h));
        for a in step.unfollows {
            self.honeypots[hi].followings.remove(&a);
            self.log(EventKind::Unfollow, me, Entity::Agent(a), h);
        }
        for (a, unfollow_at) in step.follows {
            self.honeypots[hi].followings.insert(a, FollowingEntry { since: self.now, unfollow_at: Some(unfollow_at) });
            self.log(EventKind::Follow, me, Entity::Agent(a), h);
            if self.rng.random::<f64>() < self.spec.profile.fu_follow_back_p {
                let wait = self.rng.random_range(10..720);
                self.schedule(self.now.plus_minutes(wait), Action::FollowResponse { agent: a, h });
            }
        }
    }

    fn sponsor_day(&mut self, h: u16, post: u32) -> Result<(), SimError> {
        let hi = usize::from(h);
        let Some(audience) = self.sponsor_model.topic(&self.honeypots[hi].topic.name) else {
            warn!("no sponsored audience for topic {}", self.honeypots[hi].topic.name);
            return Ok(());
        };
        let viewers = deliver_sponsorship(&self.honeypots[hi].posts[post as usize], self.now, audience, &mut self.rng)?;
        for viewer in viewers {
            let minute = self.rng.random_range(0..MINUTES_PER_DAY);
            self.schedule(SimTime::new(self.now.day, minute), Action::Impression { h, post, viewer });
        }
        Ok(())
    }

    fn impression(&mut self, h: u16, post: u32, viewer: AudienceSample) {
        let hi = usize::from(h);
        let pid = self.honeypots[hi].posts[post as usize].id;
        self.log(EventKind::SponsoredImpression, Entity::Honeypot(HoneypotRef(h)), Entity::Post(pid), h);
        let profile = &self.spec.profile;
        let mean = profile.sponsor_affinity * profile.topic(&self.honeypots[hi].topic.name).interest_share;
        let affinity = (self.rng.random::<f64>() * 2.0 * mean).min(1.0);
        let r = react_with_affinity(
            affinity,
            &self.honeypots[hi].posts[post as usize].content,
            Exposure::SPONSORED,
            false,
            &self.spec.profile,
            &mut self.rng,
        );
        if !r.any() {
            return;
        }
        let id = AgentId(self.agents.len() as u32);
        let topic = self.honeypots[hi].topic.name.clone();
        let agent = sponsored_viewer(id, &viewer, &topic, affinity, &mut self.rng);
        self.agents.push(agent);
        self.apply_reaction(id, h, post, r.like, r.comment, r.follow);
    }

    fn snapshot(&mut self) {
        let day = self.now.day;
        for (h, hp) in self.honeypots.iter_mut().enumerate() {
            let per_post: Vec<PostMetrics> = hp
                .posts
                .iter()
                .map(|p| PostMetrics { post: p.id, likes: p.likes, comments: p.comments.len() as u32 })
                .collect();
            hp.daily_snapshots.push(MetricsSnapshot {
                day,
                followers_analytic: (hp.followers.len() - self.purchased[h]) as u32,
                cumulative_likes: per_post.iter().map(|p| u64::from(p.likes)).sum(),
                cumulative_comments: per_post.iter().map(|p| u64::from(p.comments)).sum(),
                per_post,
            });
        }
    }

    fn into_record(self) -> RunRecord {
        RunRecord {
            seed: self.seed,
            config_hash: self.spec.hash(),
            horizon_days: self.spec.horizon_days,
            honeypots: self.honeypots,
            agents: self.agents,
            events: self.events,
        }
    }
}

#[cfg(test)]
mod tests;
