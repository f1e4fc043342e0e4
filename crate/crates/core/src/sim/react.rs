use rand::seq::IndexedRandom;
use rand::Rng;

use super::BehaviorProfile;
use crate::content::ContentDescriptor;
use crate::domain::Agent;

/// How an agent came across a post.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exposure {
    pub sponsored: bool,
    /// Multiplier on the follow probability (profile visits look harder).
    pub follow_boost: f64,
}

impl Exposure {
    pub const FEED: Exposure = Exposure { sponsored: false, follow_boost: 1.0 };
    pub const SPONSORED: Exposure = Exposure { sponsored: true, follow_boost: 1.0 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionProbs {
    pub like: f64,
    pub comment: f64,
    pub follow: f64,
}

/// `base * affinity * appeal * (1 + b_cta [cta]) * (1 + b_sp [sponsored])`, clamped.
pub fn reaction_probs(
    profile: &BehaviorProfile,
    affinity: f64,
    content: &ContentDescriptor,
    exposure: Exposure,
) -> ReactionProbs {
    let cta = if content.caption.cta.is_some() { 1.0 + profile.cta_bonus } else { 1.0 };
    let sp = if exposure.sponsored { 1.0 + profile.sponsor_boost } else { 1.0 };
    let common = affinity * content.appeal * cta * sp;
    ReactionProbs {
        like: (profile.base_like * common).clamp(0.0, 1.0),
        comment: (profile.base_comment * common).clamp(0.0, 1.0),
        follow: (profile.base_follow * common * exposure.follow_boost).clamp(0.0, 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Reaction {
    pub like: bool,
    pub comment: bool,
    pub follow: bool,
}

impl Reaction {
    pub fn any(&self) -> bool {
        self.like || self.comment || self.follow
    }
}

/// Independent like, comment and follow draws for one exposure.
///
/// Three uniforms are always consumed so the stream position does not depend
/// on the outcome. `follow` is false when the agent already follows.
pub fn agent_react<R: Rng + ?Sized>(
    agent: &Agent,
    topic: &str,
    content: &ContentDescriptor,
    exposure: Exposure,
    already_following: bool,
    profile: &BehaviorProfile,
    rng: &mut R,
) -> Reaction {
    react_with_affinity(agent.interest(topic), content, exposure, already_following, profile, rng)
}

pub fn react_with_affinity<R: Rng + ?Sized>(
    affinity: f64,
    content: &ContentDescriptor,
    exposure: Exposure,
    already_following: bool,
    profile: &BehaviorProfile,
    rng: &mut R,
) -> Reaction {
    let p = reaction_probs(profile, affinity, content, exposure);
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    Reaction { like: u1 < p.like, comment: u2 < p.comment, follow: !already_following && u3 < p.follow }
}

pub const SPAM_LATENCY_SECONDS: (u32, u32) = (5, 120);

const MENTION_HANDLES: [&str; 8] = [
    "insta.shoutouts",
    "promo_hub",
    "featured.daily",
    "growth.agency",
    "viral_pages",
    "collab.central",
    "boost_my_page",
    "dm.for.promo",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BotComment {
    pub text: String,
    pub latency_seconds: u32,
}

/// A spam bot's reaction to a post carrying `post_tags`.
///
/// Fires with `spambot_trigger_p` when the post shares a hashtag with the
/// bot's trigger list; the text fills a template's `{mention}` with a handle.
pub fn spambot_react<R: Rng + ?Sized>(
    bot: &Agent,
    post_tags: &[String],
    templates: &[String],
    profile: &BehaviorProfile,
    rng: &mut R,
) -> Option<BotComment> {
    if !bot.trigger_tags.iter().any(|t| post_tags.contains(t)) {
        return None;
    }
    if rng.random::<f64>() >= profile.spambot_trigger_p {
        return None;
    }
    let template = templates.choose(rng)?;
    let handle = MENTION_HANDLES.choose(rng).expect("non-empty");
    let text = template.replace("{mention}", &format!("@{handle}"));
    let latency_seconds = rng.random_range(SPAM_LATENCY_SECONDS.0..=SPAM_LATENCY_SECONDS.1);
    Some(BotComment { text, latency_seconds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{Caption, GenerationStrategy};
    use crate::domain::{AgeBucket, AgentCategory, AgentId, Gender};
    use crate::fixtures::Fixtures;
    use crate::rng::seeded_rng;
    use std::collections::BTreeMap;

    fn content(appeal: f64, cta: bool) -> ContentDescriptor {
        ContentDescriptor {
            appeal,
            topic_affinity: 1.0,
            caption: Caption {
                body: "x".into(),
                hashtags: vec!["cat".into(), "kitten".into()],
                cta: cta.then(|| "How was your day?".to_string()),
                emoji_count: 0,
                is_quote: false,
            },
            provenance: GenerationStrategy::QuotesModel,
        }
    }

    fn agent(affinity: f64) -> Agent {
        Agent {
            id: AgentId(1),
            category: AgentCategory::RealPerson,
            gender: Gender::F,
            age_bucket: AgeBucket::Age25To34,
            region: "Lazio".into(),
            follower_count: 200,
            following_count: 300,
            post_count: 40,
            has_real_picture: true,
            username_entropy: 0.4,
            interests: BTreeMap::from([("cat".to_string(), affinity)]),
            activity_rate: 1.0,
            trigger_tags: vec![],
            passive: false,
        }
    }

    fn bot(tags: &[&str]) -> Agent {
        Agent {
            category: AgentCategory::SpamBot,
            interests: BTreeMap::new(),
            trigger_tags: tags.iter().map(|s| s.to_string()).collect(),
            ..agent(0.0)
        }
    }

    #[test]
    fn zero_affinity_never_reacts() {
        let profile = BehaviorProfile { base_like: 1.0, base_comment: 1.0, base_follow: 1.0, ..Default::default() };
        let mut rng = seeded_rng(1);
        let a = agent(0.0);
        for _ in 0..10_000 {
            assert!(!agent_react(&a, "cat", &content(1.0, true), Exposure::SPONSORED, false, &profile, &mut rng).any());
        }
    }

    #[test]
    fn like_rate_matches_base_rate() {
        let profile = BehaviorProfile { base_like: 0.3, ..Default::default() };
        let mut rng = seeded_rng(42);
        let a = agent(1.0);
        let c = content(1.0, false);
        let n = 100_000;
        let likes = (0..n)
            .filter(|_| agent_react(&a, "cat", &c, Exposure::FEED, false, &profile, &mut rng).like)
            .count();
        assert!((likes as f64 / n as f64 - 0.3).abs() <= 0.01);
    }

    #[test]
    fn sponsor_boost_zero_is_identity() {
        let profile = BehaviorProfile { sponsor_boost: 0.0, ..Default::default() };
        let a = agent(0.7);
        let c = content(0.6, true);
        let mut r1 = seeded_rng(3);
        let mut r2 = seeded_rng(3);
        for _ in 0..5000 {
            let x = agent_react(&a, "cat", &c, Exposure::FEED, false, &profile, &mut r1);
            let y = agent_react(&a, "cat", &c, Exposure::SPONSORED, false, &profile, &mut r2);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn followers_do_not_follow_again() {
        let profile = BehaviorProfile { base_follow: 1.0, ..Default::default() };
        let mut rng = seeded_rng(4);
        let r = agent_react(&agent(1.0), "cat", &content(1.0, true), Exposure::FEED, true, &profile, &mut rng);
        assert!(!r.follow);
    }

    #[test]
    fn spambot_comments_match_patterns_and_latency() {
        let f = Fixtures::builtin();
        let profile = BehaviorProfile { spambot_trigger_p: 1.0, ..Default::default() };
        let b = bot(&["kitten"]);
        let tags = vec!["cat".to_string(), "kitten".to_string()];
        let mut rng = seeded_rng(5);
        for _ in 0..500 {
            let c = spambot_react(&b, &tags, &f.spam_bot_templates, &profile, &mut rng).unwrap();
            assert!(c.text.contains('@'));
            let lower = c.text.to_lowercase();
            assert!(f.spam_patterns.iter().any(|p| lower.contains(&p.to_lowercase())), "{}", c.text);
            assert!((5..=120).contains(&c.latency_seconds));
        }
        let other = bot(&["car"]);
        assert!(spambot_react(&other, &tags, &f.spam_bot_templates, &profile, &mut rng).is_none());
    }
}
