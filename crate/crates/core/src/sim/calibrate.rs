use std::collections::BTreeMap;

use log::info;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{run, BehaviorProfile, RunRecord, RunSpec, SimError};
use crate::par::Execution;
use crate::rng::{derive_seed, split};

/// Target means of one group (e.g. `topic:cat`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTarget {
    pub group: String,
    pub followers: f64,
    pub comments: f64,
    pub likes: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CalibrationTargets {
    pub groups: Vec<GroupTarget>,
}

#[derive(Debug, Deserialize)]
struct TargetRow {
    group: String,
    followers_mean: f64,
    comments_mean: f64,
    likes_mean: f64,
}

impl CalibrationTargets {
    /// Reads the `group, followers_mean, .., likes_mean, ..` CSV layout; extra columns are ignored.
    pub fn from_csv(text: &str) -> Result<Self, SimError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let groups = r
            .deserialize::<TargetRow>()
            .map(|row| {
                let row = row.map_err(|e| SimError::Spec(format!("targets: {e}")))?;
                Ok(GroupTarget {
                    group: row.group,
                    followers: row.followers_mean,
                    comments: row.comments_mean,
                    likes: row.likes_mean,
                })
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        if groups.is_empty() {
            return Err(SimError::Spec("targets: no groups".into()));
        }
        Ok(CalibrationTargets { groups })
    }

    pub fn builtin() -> Self {
        Self::from_csv(crate::fixtures::GROUP_TARGETS).expect("shipped targets parse")
    }
}

/// Group labels of a honeypot: `topic:<name>`, `strategy:<group>`, `plan:<plan>`.
pub fn group_labels(h: &crate::domain::Honeypot) -> [String; 3] {
    [
        format!("topic:{}", h.topic.name),
        format!("strategy:{}", h.strategy_group().label()),
        format!("plan:{}", h.plan.plan.label()),
    ]
}

/// Per-group means of final followers, total comments and total likes,
/// pooled over every honeypot of every record.
pub fn group_means(records: &[RunRecord]) -> BTreeMap<String, [f64; 3]> {
    let mut acc: BTreeMap<String, ([f64; 3], usize)> = BTreeMap::new();
    for r in records {
        for h in &r.honeypots {
            let m = [
                h.analytic_follower_count() as f64,
                h.posts.iter().map(|p| p.comments.len() as f64).sum(),
                h.posts.iter().map(|p| f64::from(p.likes)).sum(),
            ];
            for g in group_labels(h) {
                let e = acc.entry(g).or_insert(([0.0; 3], 0));
                for (s, v) in e.0.iter_mut().zip(m) {
                    *s += v;
                }
                e.1 += 1;
            }
        }
    }
    acc.into_iter().map(|(g, (s, n))| (g, s.map(|v| v / n as f64))).collect()
}

/// Sum of squared relative errors over every targeted group and metric.
/// Groups missing from the simulation count as a relative error of 1.
pub fn loss(means: &BTreeMap<String, [f64; 3]>, targets: &CalibrationTargets) -> f64 {
    targets
        .groups
        .iter()
        .map(|t| {
            let want = [t.followers, t.comments, t.likes];
            match means.get(&t.group) {
                Some(got) => want.iter().zip(got).map(|(w, g)| ((g - w) / w).powi(2)).sum::<f64>(),
                None => 3.0,
            }
        })
        .sum()
}

/// One searchable knob with its log-uniform range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knob {
    pub name: String,
    pub low: f64,
    pub high: f64,
}

impl Knob {
    pub fn new(name: &str, low: f64, high: f64) -> Self {
        Knob { name: name.into(), low, high }
    }
}

/// Sets the named profile parameter. Topic parameters use `topic.<name>.<field>`.
pub fn set_knob(p: &mut BehaviorProfile, name: &str, v: f64) -> Result<(), SimError> {
    let slot = match name {
        "base_like" => &mut p.base_like,
        "base_comment" => &mut p.base_comment,
        "base_follow" => &mut p.base_follow,
        "discovery_rate" => &mut p.discovery_rate,
        "spambot_trigger_p" => &mut p.spambot_trigger_p,
        "spambot_follow_p" => &mut p.spambot_follow_p,
        "follower_view_p" => &mut p.follower_view_p,
        "author_visit_p" => &mut p.author_visit_p,
        "comment_viewer_visits" => &mut p.comment_viewer_visits,
        "fu_follow_back_p" => &mut p.fu_follow_back_p,
        "sponsor_affinity" => &mut p.sponsor_affinity,
        "visit_follow_boost" => &mut p.visit_follow_boost,
        "background.rate_per_100m" => &mut p.background.rate_per_100m,
        "passive_dilution.gamma" => &mut p.passive_dilution.gamma,
        "passive_dilution.follow_gamma" => &mut p.passive_dilution.follow_gamma,
        other => {
            let parts: Vec<&str> = other.split('.').collect();
            let [_, topic, field] = parts[..] else {
                return Err(SimError::Spec(format!("unknown knob `{other}`")));
            };
            if parts[0] != "topic" {
                return Err(SimError::Spec(format!("unknown knob `{other}`")));
            }
            let t = p.topics.entry(topic.to_string()).or_default();
            match field {
                "interest_share" => &mut t.interest_share,
                "bot_weight" => &mut t.bot_weight,
                "page_weight" => &mut t.page_weight,
                _ => return Err(SimError::Spec(format!("unknown knob `{other}`"))),
            }
        }
    };
    *slot = v;
    Ok(())
}

/// Search space used when none is given.
pub fn default_space() -> Vec<Knob> {
    vec![
        Knob::new("base_like", 0.2, 0.6),
        Knob::new("base_comment", 0.001, 0.01),
        Knob::new("base_follow", 0.004, 0.02),
        Knob::new("discovery_rate", 0.01, 0.05),
        Knob::new("spambot_trigger_p", 0.002, 0.01),
        Knob::new("spambot_follow_p", 0.005, 0.03),
        Knob::new("follower_view_p", 0.2, 0.7),
        Knob::new("author_visit_p", 0.05, 0.25),
        Knob::new("comment_viewer_visits", 0.1, 0.6),
        Knob::new("fu_follow_back_p", 0.1, 0.4),
        Knob::new("visit_follow_boost", 5.0, 30.0),
        Knob::new("sponsor_affinity", 0.02, 0.15),
        Knob::new("passive_dilution.gamma", 0.05, 0.5),
        Knob::new("passive_dilution.follow_gamma", 0.2, 1.0),
        Knob::new("topic.cat.interest_share", 0.4, 0.9),
        Knob::new("topic.food.interest_share", 0.15, 0.5),
        Knob::new("topic.car.interest_share", 0.1, 0.35),
        Knob::new("topic.car.bot_weight", 1.0, 3.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CalibrationStatus {
    /// Loss fell below the tolerance.
    Converged,
    /// Every evaluation was spent; the outcome holds the best profile seen.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOutcome {
    pub profile: BehaviorProfile,
    pub loss: f64,
    pub evaluations: usize,
    pub status: CalibrationStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSettings {
    pub budget: usize,
    pub replicates: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub execution: Execution,
}

/// Mean loss of `profile` on `base` over the settings' replicates.
pub fn evaluate(
    base: &RunSpec,
    profile: &BehaviorProfile,
    targets: &CalibrationTargets,
    settings: &CalibrationSettings,
) -> Result<f64, SimError> {
    let spec = RunSpec { profile: profile.clone(), ..base.clone() };
    let records = settings
        .execution
        .map_indexed(settings.replicates, |i| run(&spec, derive_seed(settings.seed, &format!("replicate/{i}"))))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(loss(&group_means(&records), targets))
}

/// Random search around `start`: the first evaluation is `start` itself,
/// later ones redraw every knob log-uniformly within its range.
pub fn calibrate(
    base: &RunSpec,
    start: &BehaviorProfile,
    space: &[Knob],
    targets: &CalibrationTargets,
    settings: &CalibrationSettings,
) -> Result<CalibrationOutcome, SimError> {
    if settings.budget == 0 {
        return Err(SimError::BudgetExhausted { budget: 0, loss: f64::INFINITY });
    }
    let mut rng = split(settings.seed, "calibrate");
    let mut best = start.clone();
    let mut best_loss = evaluate(base, start, targets, settings)?;
    info!("calibrate: start loss {best_loss:.4}");
    let mut evaluations = 1;
    while evaluations < settings.budget && best_loss > settings.tolerance {
        let mut candidate = best.clone();
        for k in space {
            let v = (k.low.ln() + rng.random::<f64>() * (k.high.ln() - k.low.ln())).exp();
            set_knob(&mut candidate, &k.name, v)?;
        }
        evaluations += 1;
        if candidate.validate().is_err() {
            continue;
        }
        let l = evaluate(base, &candidate, targets, settings)?;
        if l < best_loss {
            info!("calibrate: evaluation {evaluations} improved loss to {l:.4}");
            best = candidate;
            best_loss = l;
        }
    }
    let status =
        if best_loss <= settings.tolerance { CalibrationStatus::Converged } else { CalibrationStatus::BudgetExhausted };
    Ok(CalibrationOutcome { profile: best, loss: best_loss, evaluations, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_targets() {
        let t = CalibrationTargets::builtin();
        assert_eq!(t.groups.len(), 9);
        let cat = t.groups.iter().find(|g| g.group == "topic:cat").unwrap();
        assert_eq!((cat.followers, cat.likes), (47.4, 923.1));
        let food = t.groups.iter().find(|g| g.group == "topic:food").unwrap();
        let car = t.groups.iter().find(|g| g.group == "topic:car").unwrap();
        assert_eq!((food.followers, car.followers), (38.5, 21.9));
    }

    #[test]
    fn perfect_means_have_zero_loss() {
        let t = CalibrationTargets::builtin();
        let means: BTreeMap<String, [f64; 3]> =
            t.groups.iter().map(|g| (g.group.clone(), [g.followers, g.comments, g.likes])).collect();
        assert_eq!(loss(&means, &t), 0.0);
        assert_eq!(loss(&BTreeMap::new(), &t), 27.0);
    }

    #[test]
    fn knobs_reach_profile_fields() {
        let mut p = BehaviorProfile::default();
        set_knob(&mut p, "base_like", 0.42).unwrap();
        set_knob(&mut p, "topic.cat.bot_weight", 2.5).unwrap();
        assert_eq!(p.base_like, 0.42);
        assert_eq!(p.topic("cat").bot_weight, 2.5);
        assert!(set_knob(&mut p, "nope", 1.0).is_err());
        assert!(set_knob(&mut p, "topic.cat.nope", 1.0).is_err());
    }

    #[test]
    fn default_space_knobs_stay_valid() {
        let shipped = BehaviorProfile::paper_calibrated();
        for knob in default_space() {
            let mut p = shipped.clone();
            set_knob(&mut p, &knob.name, knob.low).unwrap();
            assert_ne!(p, shipped, "{}", knob.name);
            let mut q = shipped.clone();
            set_knob(&mut q, &knob.name, knob.high).unwrap();
            assert!(p.validate().is_ok() && q.validate().is_ok(), "{}", knob.name);
        }
    }
}
