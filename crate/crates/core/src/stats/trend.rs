use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::adf::{adf_test, Regression, Stationarity};
use super::StatsError;
use crate::domain::StrategyGroup;
use crate::plans::Plan;

/// The per-honeypot series the evaluation reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoneypotSeries {
    pub id: String,
    pub topic: String,
    pub strategy: StrategyGroup,
    pub plan: Plan,
    /// Analytic followers at the end of each day.
    pub daily_followers: Vec<u32>,
    /// Final likes and comments of each post, in publication order.
    pub post_likes: Vec<u32>,
    pub post_comments: Vec<u32>,
}

impl HoneypotSeries {
    pub fn final_followers(&self) -> u32 {
        self.daily_followers.last().copied().unwrap_or(0)
    }

    pub fn total_likes(&self) -> u64 {
        self.post_likes.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn total_comments(&self) -> u64 {
        self.post_comments.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn groups(&self) -> [String; 3] {
        [
            format!("topic:{}", self.topic),
            format!("strategy:{}", self.strategy.label()),
            format!("plan:{}", self.plan.label()),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTrend {
    pub classification: Stationarity,
    pub p_value: Option<f64>,
    /// The series was constant or too short; reported as stationary.
    pub degenerate: bool,
}

/// ADF classification with lag 1 that never fails.
pub fn classify_series(values: &[f64]) -> SeriesTrend {
    match adf_test(values, 1, Regression::ConstantOnly) {
        Ok(r) => SeriesTrend { classification: r.classification, p_value: Some(r.p_value), degenerate: false },
        Err(StatsError::DegenerateSeries | StatsError::SeriesTooShort { .. }) | Err(_) => {
            SeriesTrend { classification: Stationarity::Stationary, p_value: None, degenerate: true }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single honeypot.
    pub std: f64,
}

impl MetricSummary {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        MetricSummary { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub group: String,
    pub honeypots: usize,
    pub followers: MetricSummary,
    pub comments: MetricSummary,
    pub likes: MetricSummary,
    /// Honeypots classified non-stationary per metric.
    pub ns_followers: usize,
    pub ns_comments: usize,
    pub ns_likes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
    /// Per honeypot: followers, comments and likes trends, in input order.
    pub trends: Vec<(String, [SeriesTrend; 3])>,
}

pub const TREND_COLUMNS: [&str; 10] = [
    "group",
    "followers_mean",
    "followers_std",
    "comments_mean",
    "comments_std",
    "likes_mean",
    "likes_std",
    "ns_followers",
    "ns_comments",
    "ns_likes",
];

impl TrendTable {
    pub fn row(&self, group: &str) -> Option<&TrendRow> {
        self.rows.iter().find(|r| r.group == group)
    }

    /// Honeypots classified non-stationary for followers, comments and likes.
    pub fn non_stationary_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for (_, t) in &self.trends {
            for (slot, s) in c.iter_mut().zip(t) {
                *slot += usize::from(s.classification == Stationarity::NonStationary);
            }
        }
        c
    }

    /// One line per group; means and deviations to one decimal, counts as `k/n`.
    pub fn to_csv(&self) -> String {
        let mut out = TREND_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let n = r.honeypots;
            let _ = writeln!(
                out,
                "{},{:.1},{:.1},{:.1},{:.1},{:.1},{:.1},{}/{n},{}/{n},{}/{n}",
                r.group,
                r.followers.mean,
                r.followers.std,
                r.comments.mean,
                r.comments.std,
                r.likes.mean,
                r.likes.std,
                r.ns_followers,
                r.ns_comments,
                r.ns_likes,
            );
        }
        out
    }
}

/// Group means and trend counts by topic, strategy group and plan.
///
/// Followers are tested on the daily series, comments and likes on the
/// per-post series. Groups appear in order of first occurrence within each
/// dimension, dimensions in the order topic, strategy, plan.
pub fn trend_table(series: &[HoneypotSeries]) -> TrendTable {
    let as_f64 = |v: &[u32]| v.iter().map(|&x| f64::from(x)).collect::<Vec<_>>();
    let trends: Vec<(String, [SeriesTrend; 3])> = series
        .iter()
        .map(|s| {
            (
                s.id.clone(),
                [
                    classify_series(&as_f64(&s.daily_followers)),
                    classify_series(&as_f64(&s.post_comments)),
                    classify_series(&as_f64(&s.post_likes)),
                ],
            )
        })
        .collect();

    let mut order: Vec<String> = Vec::new();
    for dim in 0..3 {
        for s in series {
            let g = &s.groups()[dim];
            if !order.contains(g) {
                order.push(g.clone());
            }
        }
    }
    let rows = order
        .into_iter()
        .map(|group| {
            let members: Vec<usize> = (0..series.len()).filter(|&i| series[i].groups().contains(&group)).collect();
            let pick = |f: &dyn Fn(&HoneypotSeries) -> f64| members.iter().map(|&i| f(&series[i])).collect::<Vec<_>>();
            let ns = |m: usize| {
                members.iter().filter(|&&i| trends[i].1[m].classification == Stationarity::NonStationary).count()
            };
            TrendRow {
                honeypots: members.len(),
                followers: MetricSummary::of(&pick(&|s| f64::from(s.final_followers()))),
                comments: MetricSummary::of(&pick(&|s| s.total_comments() as f64)),
                likes: MetricSummary::of(&pick(&|s| s.total_likes() as f64)),
                ns_followers: ns(0),
                ns_comments: ns(1),
                ns_likes: ns(2),
                group,
            }
        })
        .collect();
    TrendTable { rows, trends }
}
