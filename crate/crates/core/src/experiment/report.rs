use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::ReplicateData;
use super::ExperimentError;
use crate::classify::{classify_comment, classify_follower, FollowerBreakdown, FollowerCategory, IMMEDIACY_THRESHOLD_S};
use crate::fixtures::Fixtures;
use crate::stats::{
    anova3, audience_insights, interactions_per_week, round_to, trend_table, tukey_hsd, AnovaTable, Effect,
    FollowerDemographics, HoneypotSeries, InsightsOutcome, Observation, TrendTable, TukeyResult,
};

pub const TUKEY_ALPHA: f64 = 0.05;
pub const PLOT_COLUMNS: [&str; 4] = ["plan", "week", "posts", "likes_per_post"];

/// Totals over every honeypot of every replicate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub followers: u64,
    pub comments: u64,
    pub likes: u64,
}

impl Totals {
    pub fn interactions(&self) -> u64 {
        self.followers + self.comments + self.likes
    }
}

/// Mean likes per post published in `week` (1-based) by honeypots of `plan`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub plan: String,
    pub week: u32,
    pub posts: usize,
    pub likes_per_post: f64,
}

/// Tukey HSD of one metric grouped by one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeySection {
    pub metric: String,
    pub factor: String,
    pub result: Result<TukeyResult, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpamSummary {
    pub comments: usize,
    pub spam: usize,
}

impl SpamSummary {
    pub fn fraction(&self) -> Option<f64> {
        (self.comments > 0).then(|| self.spam as f64 / self.comments as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightsLine {
    pub honeypot: String,
    pub outcome: InsightsOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub replicates: usize,
    pub honeypots: usize,
    pub weeks: f64,
    pub totals: Totals,
    pub trend: TrendTable,
    pub anova_likes: Result<AnovaTable, String>,
    pub anova_followers: Result<AnovaTable, String>,
    pub tukey: Vec<TukeySection>,
    pub spam: SpamSummary,
    /// Non-purchased followers, judged against simulator ground truth.
    pub followers: FollowerBreakdown,
    pub purchased_followers: usize,
    pub insights: Vec<InsightsLine>,
    pub plot: Vec<PlotPoint>,
}

/// Honeypot labels are prefixed with the replicate index when there are several.
fn label(replicates: usize, r: usize, id: &str) -> String {
    if replicates == 1 {
        id.to_string()
    } else {
        format!("r{r}/{id}")
    }
}

/// Analytics over one or more replicates, pooled.
pub fn analyze(data: &[ReplicateData]) -> Result<AnalysisReport, ExperimentError> {
    let first = data.first().ok_or(crate::stats::StatsError::EmptyInput)?;
    let weeks = f64::from(first.meta.horizon_days) / 7.0;
    let n = data.len();
    let mut totals = Totals::default();
    let mut series = Vec::new();
    let mut post_obs = Vec::new();
    let mut follower_obs = Vec::new();
    let mut plot: BTreeMap<(String, u32), (usize, u64)> = BTreeMap::new();
    let mut insights = Vec::new();
    for (r, d) in data.iter().enumerate() {
        for (i, h) in d.honeypots.iter().enumerate() {
            let posts: Vec<_> = d.posts_of(&h.id).collect();
            let group = h.strategy_group();
            let followers = d.final_followers(i);
            let s = HoneypotSeries {
                id: label(n, r, &h.id),
                topic: h.topic.clone(),
                strategy: group,
                plan: h.plan,
                daily_followers: d.snapshots[i].iter().map(|s| s.followers).collect(),
                post_likes: posts.iter().map(|p| p.likes).collect(),
                post_comments: posts.iter().map(|p| p.comments).collect(),
            };
            totals.followers += u64::from(followers);
            totals.comments += s.total_comments();
            totals.likes += s.total_likes();
            for p in &posts {
                post_obs.push(Observation::new(f64::from(p.likes), &h.topic, group.label(), h.plan.label()));
                let e = plot.entry((h.plan.label().to_string(), p.day / 7 + 1)).or_default();
                e.0 += 1;
                e.1 += u64::from(p.likes);
            }
            follower_obs.push(Observation::new(f64::from(followers), &h.topic, group.label(), h.plan.label()));
            let demographics: Vec<FollowerDemographics> = d
                .followers
                .iter()
                .filter(|f| f.honeypot == h.id)
                .map(|f| FollowerDemographics {
                    gender: f.gender,
                    age_bucket: f.age,
                    region: f.region.clone(),
                    purchased: f.purchased,
                })
                .collect();
            insights.push(InsightsLine { honeypot: label(n, r, &h.id), outcome: audience_insights(&demographics) });
            series.push(s);
        }
    }

    let patterns = &Fixtures::builtin().spam_patterns;
    let mut spam = SpamSummary { comments: 0, spam: 0 };
    let mut followers = FollowerBreakdown::default();
    let mut purchased_followers = 0;
    for d in data {
        for c in &d.comments {
            spam.comments += 1;
            spam.spam += usize::from(classify_comment(&c.text, c.latency_seconds, patterns, IMMEDIACY_THRESHOLD_S).is_spam);
        }
        for f in &d.followers {
            if f.purchased {
                purchased_followers += 1;
                continue;
            }
            let predicted = classify_follower(&f.profile, f.topic_specific);
            followers.add(predicted, Some(FollowerCategory::truth(f.category)));
        }
    }

    let mut tukey = Vec::new();
    for (metric, obs) in [("likes_per_post", &post_obs), ("final_followers", &follower_obs)] {
        for (factor, key) in [("topic", 0), ("strategy", 1), ("plan", 2)] {
            let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
            for o in obs.iter() {
                let level = [&o.topic, &o.strategy, &o.plan][key];
                match groups.iter_mut().find(|(g, _)| g == level) {
                    Some((_, v)) => v.push(o.value),
                    None => groups.push((level.clone(), vec![o.value])),
                }
            }
            tukey.push(TukeySection {
                metric: metric.into(),
                factor: factor.into(),
                result: tukey_hsd(&groups, TUKEY_ALPHA).map_err(|e| e.to_string()),
            });
        }
    }

    Ok(AnalysisReport {
        replicates: n,
        honeypots: series.len(),
        weeks,
        totals,
        trend: trend_table(&series),
        anova_likes: anova3(&post_obs).map_err(|e| e.to_string()),
        anova_followers: anova3(&follower_obs).map_err(|e| e.to_string()),
        tukey,
        spam,
        followers,
        purchased_followers,
        insights,
        plot: plot
            .into_iter()
            .map(|((plan, week), (posts, likes))| PlotPoint {
                plan,
                week,
                posts,
                likes_per_post: likes as f64 / posts as f64,
            })
            .collect(),
    })
}

fn p_text(p: f64) -> String {
    if p < 0.001 {
        "≤ 0.001".into()
    } else {
        format!("{p:.3}")
    }
}

fn anova_text(out: &mut String, title: &str, t: &Result<AnovaTable, String>) {
    let _ = writeln!(out, "\n[anova {title}]");
    match t {
        Err(e) => {
            let _ = writeln!(out, "unavailable: {e}");
        }
        Ok(t) => {
            let _ = writeln!(out, "effect,sum_sq,df,f,p");
            for r in &t.rows {
                let f = r.f.map(|f| format!("{f:.4}")).unwrap_or_default();
                let p = r.p_value.map(p_text).unwrap_or_default();
                let _ = writeln!(out, "{},{:.4},{},{f},{p}", r.effect.label(), r.sum_sq, r.df);
            }
        }
    }
}

impl AnalysisReport {
    pub fn tukey_for(&self, metric: &str, factor: &str) -> Option<&TukeyResult> {
        self.tukey.iter().find(|s| s.metric == metric && s.factor == factor).and_then(|s| s.result.as_ref().ok())
    }

    pub fn anova_p(&self, effect: Effect) -> Option<f64> {
        self.anova_likes.as_ref().ok().and_then(|t| t.get(effect).p_value)
    }

    pub fn interactions_per_week(&self) -> Result<f64, ExperimentError> {
        Ok(interactions_per_week(self.totals.interactions(), self.honeypots as u32, self.weeks)?)
    }

    pub fn followers_per_week(&self) -> Result<f64, ExperimentError> {
        Ok(interactions_per_week(self.totals.followers, self.honeypots as u32, self.weeks)?)
    }

    /// Line-oriented report; sections start with `[name]`.
    pub fn to_text(&self) -> Result<String, ExperimentError> {
        let mut out = String::new();
        let _ = writeln!(out, "[summary]");
        let _ = writeln!(out, "replicates: {}", self.replicates);
        let _ = writeln!(out, "honeypots: {}", self.honeypots);
        let _ = writeln!(out, "weeks: {}", self.weeks);
        let _ = writeln!(out, "followers: {}", self.totals.followers);
        let _ = writeln!(out, "comments: {}", self.totals.comments);
        let _ = writeln!(out, "likes: {}", self.totals.likes);
        let _ = writeln!(out, "interactions: {}", self.totals.interactions());
        let _ = writeln!(out, "interactions_per_week: {:.1}", round_to(self.interactions_per_week()?, 1));
        let _ = writeln!(out, "followers_per_week: {:.2}", round_to(self.followers_per_week()?, 2));

        let _ = writeln!(out, "\n[trend]");
        out.push_str(&self.trend.to_csv());

        anova_text(&mut out, "likes_per_post", &self.anova_likes);
        anova_text(&mut out, "final_followers", &self.anova_followers);

        for s in &self.tukey {
            let _ = writeln!(out, "\n[tukey {} by {}]", s.metric, s.factor);
            match &s.result {
                Err(e) => {
                    let _ = writeln!(out, "unavailable: {e}");
                }
                Ok(t) => {
                    let _ = writeln!(out, "group_a,group_b,mean_diff,q,p,significant");
                    for p in &t.pairs {
                        let _ = writeln!(
                            out,
                            "{},{},{:.4},{:.4},{},{}",
                            p.group_a,
                            p.group_b,
                            p.mean_diff,
                            p.q_stat,
                            p_text(p.p_value),
                            p.significant
                        );
                    }
                }
            }
        }

        let _ = writeln!(out, "\n[classifiers]");
        let _ = writeln!(out, "comments: {}", self.spam.comments);
        let _ = writeln!(out, "spam_comments: {}", self.spam.spam);
        match self.spam.fraction() {
            Some(f) => writeln!(out, "spam_percent: {:.2}", 100.0 * f),
            None => writeln!(out, "spam_percent: n/a"),
        }
        .ok();
        for c in FollowerCategory::ALL {
            let _ = writeln!(out, "followers_{}: {}", c.label(), self.followers.counts[c as usize]);
        }
        let _ = writeln!(out, "followers_purchased: {}", self.purchased_followers);
        match self.followers.accuracy() {
            Some(a) => writeln!(out, "follower_accuracy_percent: {:.2}", 100.0 * a),
            None => writeln!(out, "follower_accuracy_percent: n/a"),
        }
        .ok();
        let _ = writeln!(out, "follower_signals: picture, username entropy, follower ratio and post count are proxies");

        let _ = writeln!(out, "\n[insights]");
        for line in &self.insights {
            match &line.outcome {
                InsightsOutcome::Unavailable { analytic_followers } => {
                    let _ = writeln!(out, "{}: unavailable ({analytic_followers} followers)", line.honeypot);
                }
                InsightsOutcome::Available(i) => {
                    let fmt = |d: &crate::stats::Distribution| {
                        d.shares.iter().map(|(l, s)| format!("{l} {s:.1}%")).collect::<Vec<_>>().join("; ")
                    };
                    let _ = writeln!(
                        out,
                        "{}: {} followers | gender {} | age {} | top region {}",
                        line.honeypot,
                        i.followers,
                        fmt(&i.gender),
                        fmt(&i.age),
                        i.region.top().map(|(r, s)| format!("{r} {s:.1}%")).unwrap_or_default()
                    );
                }
            }
        }
        Ok(out)
    }

    pub fn trend_csv(&self) -> String {
        self.trend.to_csv()
    }

    pub fn plot_csv(&self) -> String {
        let mut out = PLOT_COLUMNS.join(",");
        out.push('\n');
        for p in &self.plot {
            let _ = writeln!(out, "{},{},{},{:.4}", p.plan, p.week, p.posts, p.likes_per_post);
        }
        out
    }

    /// Writes `report.txt`, `trend.csv` and `plot_likes_per_week.csv`.
    pub fn write(&self, dir: &Path) -> Result<(), ExperimentError> {
        fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
        for (name, text) in [
            ("report.txt", self.to_text()?),
            ("trend.csv", self.trend_csv()),
            ("plot_likes_per_week.csv", self.plot_csv()),
        ] {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| ExperimentError::io(&path, e))?;
        }
        Ok(())
    }
}
