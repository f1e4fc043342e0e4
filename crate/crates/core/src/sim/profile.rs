use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::content::AppealModel;
use crate::fixtures::PAPER_CALIBRATED_PROFILE;

/// Engagement knobs of one topic's audience.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicBehavior {
    /// Probability that a non-bot agent cares about the topic at all.
    pub interest_share: f64,
    /// Relative number of spam bots watching the topic's hashtags.
    pub bot_weight: f64,
    /// Relative number of pages focused on the topic.
    pub page_weight: f64,
}

impl Default for TopicBehavior {
    fn default() -> Self {
        TopicBehavior { interest_share: 0.4, bot_weight: 1.0, page_weight: 1.0 }
    }
}

/// Posts by other accounts competing for the hashtag feeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundModel {
    /// Arrivals per day per 100M posts of tag coverage.
    pub rate_per_100m: f64,
    /// Log-normal parameters of a background post's `likes + 2 comments`.
    pub engagement_mu: f64,
    pub engagement_sigma: f64,
    /// Days of arrivals simulated before day 0.
    pub warmup_days: u32,
}

/// Penalty for pages whose followers are mostly purchased, with base
/// `(organic + k) / (all + k)`: `gamma` thins reach, `follow_gamma` thins
/// follow decisions of agents who do see a post.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PassiveDilution {
    pub k: f64,
    pub gamma: f64,
    #[serde(default)]
    pub follow_gamma: f64,
}

impl PassiveDilution {
    fn base(&self, organic: usize, all: usize) -> f64 {
        (organic as f64 + self.k) / (all as f64 + self.k)
    }

    pub fn multiplier(&self, organic: usize, all: usize) -> f64 {
        self.base(organic, all).powf(self.gamma)
    }

    pub fn follow_multiplier(&self, organic: usize, all: usize) -> f64 {
        self.base(organic, all).powf(self.follow_gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationMix {
    pub real: f64,
    pub page: f64,
    pub bot: f64,
    /// Hashtags each spam bot watches.
    pub bot_tags: u32,
}

impl Default for PopulationMix {
    fn default() -> Self {
        PopulationMix { real: 0.60, page: 0.25, bot: 0.15, bot_tags: 3 }
    }
}

/// Generative user model driving every reaction in a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorProfile {
    pub calibration_name: String,
    pub base_like: f64,
    pub base_comment: f64,
    pub base_follow: f64,
    /// Relative lift of every reaction when the caption carries a CTA.
    pub cta_bonus: f64,
    /// Relative lift for sponsored impressions.
    pub sponsor_boost: f64,
    /// Mean hashtag-feed sessions per interested agent per day.
    pub discovery_rate: f64,
    /// Tag popularity exponent when choosing which feed to browse.
    pub tag_browse_exponent: f64,
    pub spambot_trigger_p: f64,
    pub spambot_follow_p: f64,
    /// Chance a follower sees a new post.
    pub follower_view_p: f64,
    /// Posts looked at during a profile visit.
    pub visit_posts: u32,
    /// Follow-probability multiplier during a profile visit.
    pub visit_follow_boost: f64,
    /// Chance the author of a spammed post visits the spammer.
    pub author_visit_p: f64,
    /// Mean extra visitors brought by one spam comment.
    pub comment_viewer_visits: f64,
    /// Chance a Follow & Unfollow target follows back.
    pub fu_follow_back_p: f64,
    /// Mean topic affinity of sponsored-impression viewers, per unit of the
    /// topic's interest share.
    pub sponsor_affinity: f64,
    /// Coefficient of variation of daily sponsored reach.
    pub sponsor_reach_cv: f64,
    pub passive_dilution: PassiveDilution,
    pub background: BackgroundModel,
    pub appeal: AppealModel,
    pub population: PopulationMix,
    pub topics: BTreeMap<String, TopicBehavior>,
}

impl Default for BehaviorProfile {
    fn default() -> Self {
        let topics = [("food", 0.4), ("cat", 0.4), ("car", 0.4)]
            .into_iter()
            .map(|(t, s)| (t.to_string(), TopicBehavior { interest_share: s, ..TopicBehavior::default() }))
            .collect();
        BehaviorProfile {
            calibration_name: "default".into(),
            base_like: 0.3,
            base_comment: 0.02,
            base_follow: 0.03,
            cta_bonus: 0.1,
            sponsor_boost: 0.5,
            discovery_rate: 1.0,
            tag_browse_exponent: 0.5,
            spambot_trigger_p: 0.01,
            spambot_follow_p: 0.05,
            follower_view_p: 0.5,
            visit_posts: 3,
            visit_follow_boost: 2.0,
            author_visit_p: 0.1,
            comment_viewer_visits: 0.3,
            fu_follow_back_p: 0.2,
            sponsor_affinity: 0.1,
            sponsor_reach_cv: 0.2,
            passive_dilution: PassiveDilution { k: 20.0, gamma: 1.0, follow_gamma: 0.0 },
            background: BackgroundModel {
                rate_per_100m: 10.0,
                engagement_mu: 3.0,
                engagement_sigma: 1.2,
                warmup_days: 30,
            },
            appeal: AppealModel::default(),
            population: PopulationMix::default(),
            topics,
        }
    }
}

impl BehaviorProfile {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let p: BehaviorProfile = toml::from_str(text).map_err(|e| SimError::Profile(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("profile serializes")
    }

    /// The profile shipped with the crate.
    pub fn paper_calibrated() -> Self {
        BehaviorProfile::from_toml(PAPER_CALIBRATED_PROFILE).expect("shipped profile is valid")
    }

    /// Resolves a profile by name: `paper-calibrated` or `default`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "paper-calibrated" => Some(Self::paper_calibrated()),
            "default" => Some(Self::default()),
            _ => None,
        }
    }

    pub fn topic(&self, name: &str) -> TopicBehavior {
        self.topics.get(name).copied().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let probs = [
            ("spambot_trigger_p", self.spambot_trigger_p),
            ("spambot_follow_p", self.spambot_follow_p),
            ("follower_view_p", self.follower_view_p),
            ("author_visit_p", self.author_visit_p),
            ("fu_follow_back_p", self.fu_follow_back_p),
            ("sponsor_affinity", self.sponsor_affinity),
        ];
        for (name, v) in probs {
            if !(0.0..=1.0).contains(&v) {
                return Err(SimError::Profile(format!("{name} = {v} is not a probability")));
            }
        }
        let non_negative = [
            ("base_like", self.base_like),
            ("base_comment", self.base_comment),
            ("base_follow", self.base_follow),
            ("cta_bonus", self.cta_bonus),
            ("sponsor_boost", self.sponsor_boost),
            ("discovery_rate", self.discovery_rate),
            ("tag_browse_exponent", self.tag_browse_exponent),
            ("visit_follow_boost", self.visit_follow_boost),
            ("comment_viewer_visits", self.comment_viewer_visits),
            ("sponsor_reach_cv", self.sponsor_reach_cv),
            ("passive_dilution.k", self.passive_dilution.k),
            ("passive_dilution.gamma", self.passive_dilution.gamma),
            ("passive_dilution.follow_gamma", self.passive_dilution.follow_gamma),
            ("background.rate_per_100m", self.background.rate_per_100m),
            ("background.engagement_sigma", self.background.engagement_sigma),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::Profile(format!("{name} = {v} must be finite and non-negative")));
            }
        }
        if !self.appeal.is_valid() {
            return Err(SimError::Profile("appeal shapes must be positive".into()));
        }
        let mix = self.population;
        if mix.real < 0.0 || mix.page < 0.0 || mix.bot < 0.0 || mix.real + mix.page + mix.bot <= 0.0 {
            return Err(SimError::Profile("population mix must be non-negative".into()));
        }
        for (t, b) in &self.topics {
            if !(0.0..=1.0).contains(&b.interest_share) || b.bot_weight < 0.0 || b.page_weight < 0.0 {
                return Err(SimError::Profile(format!("topic `{t}` has an out-of-range weight")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let p = BehaviorProfile::default();
        assert_eq!(BehaviorProfile::from_toml(&p.to_toml()).unwrap(), p);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = BehaviorProfile::default().to_toml();
        text.insert_str(0, "bogus = 1\n");
        assert!(BehaviorProfile::from_toml(&text).is_err());
    }

    #[test]
    fn out_of_range_probability_is_rejected() {
        let p = BehaviorProfile { author_visit_p: 1.5, ..BehaviorProfile::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn dilution_is_one_without_purchases() {
        let d = PassiveDilution { k: 20.0, gamma: 1.0, follow_gamma: 0.0 };
        assert_eq!(d.multiplier(30, 30), 1.0);
        assert!((d.multiplier(0, 100) - 20.0 / 120.0).abs() < 1e-12);
        assert_eq!(d.follow_multiplier(0, 100), 1.0);
        let f = PassiveDilution { follow_gamma: 2.0, ..d };
        assert!((f.follow_multiplier(0, 100) - (20.0f64 / 120.0).powi(2)).abs() < 1e-12);
    }
}
