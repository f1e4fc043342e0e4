use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::metrics::round_to;
use crate::domain::{AgeBucket, Gender};

/// Analytics become available at this many non-purchased followers.
pub const INSIGHTS_MIN_FOLLOWERS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FollowerDemographics {
    pub gender: Gender,
    pub age_bucket: AgeBucket,
    pub region: String,
    pub purchased: bool,
}

/// Shares in percent, one decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub shares: Vec<(String, f64)>,
}

impl Distribution {
    fn from_counts(counts: Vec<(String, usize)>, total: usize) -> Self {
        Distribution {
            shares: counts.into_iter().map(|(l, c)| (l, round_to(100.0 * c as f64 / total as f64, 1))).collect(),
        }
    }

    pub fn share(&self, label: &str) -> Option<f64> {
        self.shares.iter().find(|(l, _)| l == label).map(|(_, s)| *s)
    }

    /// Largest share; ties go to the label listed first.
    pub fn top(&self) -> Option<(&str, f64)> {
        self.shares
            .iter()
            .fold(None, |best: Option<&(String, f64)>, x| match best {
                Some(b) if b.1 >= x.1 => Some(b),
                _ => Some(x),
            })
            .map(|(l, s)| (l.as_str(), *s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Insights {
    pub followers: usize,
    /// F, M, U order.
    pub gender: Distribution,
    /// Youngest bucket first; empty buckets included.
    pub age: Distribution,
    /// Largest region first, ties alphabetical.
    pub region: Distribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InsightsOutcome {
    Unavailable { analytic_followers: usize },
    Available(Insights),
}

/// Audience breakdown over non-purchased followers, gated at 100 of them.
pub fn audience_insights(followers: &[FollowerDemographics]) -> InsightsOutcome {
    let organic: Vec<&FollowerDemographics> = followers.iter().filter(|f| !f.purchased).collect();
    let n = organic.len();
    if n < INSIGHTS_MIN_FOLLOWERS {
        return InsightsOutcome::Unavailable { analytic_followers: n };
    }
    let count = |pred: &dyn Fn(&FollowerDemographics) -> bool| organic.iter().filter(|f| pred(f)).count();
    let gender = Gender::ALL.iter().map(|&g| (g.label().to_string(), count(&|f| f.gender == g))).collect();
    let age = AgeBucket::ALL.iter().map(|&a| (a.label().to_string(), count(&|f| f.age_bucket == a))).collect();
    let mut regions: BTreeMap<&str, usize> = BTreeMap::new();
    for f in &organic {
        *regions.entry(f.region.as_str()).or_default() += 1;
    }
    let mut region: Vec<(String, usize)> = regions.into_iter().map(|(r, c)| (r.to_string(), c)).collect();
    region.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    InsightsOutcome::Available(Insights {
        followers: n,
        gender: Distribution::from_counts(gender, n),
        age: Distribution::from_counts(age, n),
        region: Distribution::from_counts(region, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn follower(age: AgeBucket, region: &str, purchased: bool) -> FollowerDemographics {
        FollowerDemographics { gender: Gender::F, age_bucket: age, region: region.into(), purchased }
    }

    #[test]
    fn gate_at_one_hundred() {
        let mut fs: Vec<_> = (0..99).map(|_| follower(AgeBucket::Age25To34, "Lazio", false)).collect();
        assert_eq!(audience_insights(&fs), InsightsOutcome::Unavailable { analytic_followers: 99 });
        fs.push(follower(AgeBucket::Age25To34, "Lazio", false));
        assert!(matches!(audience_insights(&fs), InsightsOutcome::Available(_)));
    }

    #[test]
    fn purchased_followers_do_not_count() {
        let fs: Vec<_> = (0..500).map(|_| follower(AgeBucket::Age18To24, "India", true)).collect();
        assert_eq!(audience_insights(&fs), InsightsOutcome::Unavailable { analytic_followers: 0 });
    }
}
