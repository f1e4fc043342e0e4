//! Rule-based spam-comment and follower classifiers.

use serde::{Deserialize, Serialize};

use crate::domain::{Agent, AgentCategory};
use crate::stats::StatsError;

/// Comments with an `@` mention at most this many seconds after publication are spam.
pub const IMMEDIACY_THRESHOLD_S: u32 = 120;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpamVerdict {
    pub is_spam: bool,
    /// Patterns found in the text, in pattern order.
    pub matched_patterns: Vec<String>,
    pub mention_flag: bool,
    pub immediacy_flag: bool,
}

/// Spam iff some pattern occurs case-insensitively, or the text mentions
/// someone within `immediacy_threshold_s` seconds of publication.
pub fn classify_comment(
    text: &str,
    latency_seconds: u32,
    patterns: &[String],
    immediacy_threshold_s: u32,
) -> SpamVerdict {
    let lower = text.to_lowercase();
    let matched_patterns: Vec<String> =
        patterns.iter().filter(|p| !p.is_empty() && lower.contains(&p.to_lowercase())).cloned().collect();
    let mention_flag = text.contains('@');
    let immediacy_flag = latency_seconds <= immediacy_threshold_s;
    SpamVerdict {
        is_spam: !matched_patterns.is_empty() || (mention_flag && immediacy_flag),
        matched_patterns,
        mention_flag,
        immediacy_flag,
    }
}

/// Share of `(text, latency)` comments judged spam.
pub fn spam_fraction<'a>(
    comments: impl IntoIterator<Item = (&'a str, u32)>,
    patterns: &[String],
) -> Result<f64, StatsError> {
    let (mut spam, mut n) = (0usize, 0usize);
    for (text, latency) in comments {
        n += 1;
        spam += usize::from(classify_comment(text, latency, patterns, IMMEDIACY_THRESHOLD_S).is_spam);
    }
    if n == 0 {
        return Err(StatsError::EmptyInput);
    }
    Ok(spam as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FollowerCategory {
    RealPerson,
    PageInfluencer,
    Bot,
}

impl FollowerCategory {
    pub const ALL: [FollowerCategory; 3] =
        [FollowerCategory::RealPerson, FollowerCategory::PageInfluencer, FollowerCategory::Bot];

    pub fn label(self) -> &'static str {
        match self {
            FollowerCategory::RealPerson => "RealPerson",
            FollowerCategory::PageInfluencer => "PageInfluencer",
            FollowerCategory::Bot => "Bot",
        }
    }

    /// The category an agent of `c` should be assigned.
    pub fn truth(c: AgentCategory) -> Self {
        match c {
            AgentCategory::RealPerson => FollowerCategory::RealPerson,
            AgentCategory::PageInfluencer => FollowerCategory::PageInfluencer,
            AgentCategory::SpamBot => FollowerCategory::Bot,
        }
    }
}

/// The public profile fields a follower can be judged on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileView {
    pub follower_count: u32,
    pub following_count: u32,
    pub post_count: u32,
    pub has_real_picture: bool,
    pub username_entropy: f64,
}

impl From<&Agent> for ProfileView {
    fn from(a: &Agent) -> Self {
        ProfileView {
            follower_count: a.follower_count,
            following_count: a.following_count,
            post_count: a.post_count,
            has_real_picture: a.has_real_picture,
            username_entropy: a.username_entropy,
        }
    }
}

/// Above this a username looks random.
pub const RANDOM_USERNAME_ENTROPY: f64 = 0.8;
/// Pages start above this many followers.
pub const INFLUENCER_FOLLOWERS: u32 = 1000;

impl ProfileView {
    /// Bot signals that hold: missing picture, random username, lopsided
    /// follower ratio while following many, and almost no posts.
    pub fn bot_signals(&self) -> [bool; 4] {
        [
            !self.has_real_picture,
            self.username_entropy > RANDOM_USERNAME_ENTROPY,
            self.following_count > 500 && f64::from(self.follower_count) < 0.1 * f64::from(self.following_count),
            self.post_count < 5,
        ]
    }
}

/// Bot on two or more bot signals, else page when topic-specific or above
/// 1000 followers, else real person.
pub fn classify_follower(p: &ProfileView, topic_specific: bool) -> FollowerCategory {
    if p.bot_signals().iter().filter(|&&s| s).count() >= 2 {
        FollowerCategory::Bot
    } else if topic_specific || p.follower_count > INFLUENCER_FOLLOWERS {
        FollowerCategory::PageInfluencer
    } else {
        FollowerCategory::RealPerson
    }
}

/// Followers per category, in [`FollowerCategory::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FollowerBreakdown {
    pub counts: [usize; 3],
    /// Classifications that matched the ground truth, when known.
    pub correct: usize,
}

impl FollowerBreakdown {
    pub fn add(&mut self, predicted: FollowerCategory, truth: Option<FollowerCategory>) {
        self.counts[predicted as usize] += 1;
        self.correct += usize::from(truth == Some(predicted));
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn accuracy(&self) -> Option<f64> {
        (self.total() > 0).then(|| self.correct as f64 / self.total() as f64)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fixtures::{parse_labeled_comments, Fixtures, LABELED_COMMENTS};

    fn patterns() -> Vec<String> {
        Fixtures::builtin().spam_patterns.clone()
    }

    #[test]
    fn comment_examples() {
        let p = patterns();
        let dm = classify_comment("DM us for collab", 300, &p, IMMEDIACY_THRESHOLD_S);
        assert!(dm.is_spam && !dm.matched_patterns.is_empty());
        assert!(!classify_comment("So pretty!", 3600, &p, IMMEDIACY_THRESHOLD_S).is_spam);
        let at = classify_comment("@user look here", 15, &p, IMMEDIACY_THRESHOLD_S);
        assert!(at.is_spam && at.mention_flag && at.immediacy_flag && at.matched_patterns.is_empty());
        assert!(!classify_comment("@user look here", 121, &p, IMMEDIACY_THRESHOLD_S).is_spam);
    }

    #[test]
    fn labeled_fixture() {
        let labeled = parse_labeled_comments(LABELED_COMMENTS).unwrap();
        assert_eq!(labeled.len(), 300);
        let p = patterns();
        for c in &labeled {
            assert_eq!(classify_comment(&c.text, c.latency_seconds, &p, 120).is_spam, c.is_spam(), "{}", c.text);
        }
        let f = spam_fraction(labeled.iter().map(|c| (c.text.as_str(), c.latency_seconds)), &p).unwrap();
        assert_eq!(format!("{:.2}", 100.0 * f), "95.33");
    }

    #[test]
    fn saturated_fractions() {
        let p = patterns();
        assert_eq!(spam_fraction([("So pretty!", 999)], &p).unwrap(), 0.0);
        assert_eq!(spam_fraction([("send pic", 999), ("DM us", 5)], &p).unwrap(), 1.0);
        assert!(matches!(spam_fraction(std::iter::empty(), &p), Err(StatsError::EmptyInput)));
    }

    #[test]
    fn follower_examples() {
        let real = ProfileView {
            follower_count: 500,
            following_count: 400,
            post_count: 50,
            has_real_picture: true,
            username_entropy: 0.4,
        };
        assert_eq!(classify_follower(&real, false), FollowerCategory::RealPerson);
        let page = ProfileView { follower_count: 5000, ..real };
        assert_eq!(classify_follower(&page, true), FollowerCategory::PageInfluencer);
        let bot = ProfileView {
            follower_count: 10,
            following_count: 2000,
            post_count: 2,
            has_real_picture: false,
            username_entropy: 0.95,
        };
        assert_eq!(classify_follower(&bot, false), FollowerCategory::Bot);
    }

    proptest! {
        #[test]
        fn extra_pattern_never_clears_spam(text in "[ a-zA-Z@!]{0,30}", latency in 0u32..1000, extra in "[a-z ]{1,8}") {
            let p = patterns();
            let before = classify_comment(&text, latency, &p, 120);
            let mut more = p.clone();
            more.push(extra);
            let after = classify_comment(&text, latency, &more, 120);
            prop_assert!(!before.is_spam || after.is_spam);
            prop_assert!(!after.is_spam || !after.matched_patterns.is_empty() || (after.mention_flag && after.immediacy_flag));
        }

        #[test]
        fn follower_rule_ignores_signal_order(
            followers in 0u32..5000, following in 0u32..5000, posts in 0u32..20,
            picture: bool, entropy in 0.0f64..1.0, topic: bool,
        ) {
            let v = ProfileView { follower_count: followers, following_count: following, post_count: posts, has_real_picture: picture, username_entropy: entropy };
            let mut s = v.bot_signals();
            let forward = s.iter().filter(|&&x| x).count();
            s.reverse();
            prop_assert_eq!(forward, s.iter().filter(|&&x| x).count());
            prop_assert_eq!(classify_follower(&v, topic), classify_follower(&v, topic));
        }
    }
}
