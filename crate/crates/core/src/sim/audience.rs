use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::SimError;
use crate::domain::{AgeBucket, Gender, Post};
use crate::fixtures::SponsoredAudienceTable;
use crate::time::SimTime;

/// Region label for the share not covered by a post's reported top regions.
pub const OTHER_REGION: &str = "Other";

#[derive(Debug, Clone)]
pub struct Categorical<T> {
    items: Vec<T>,
    probs: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl<T: Clone> Categorical<T> {
    /// Normalizes non-negative weights; at least one must be positive.
    pub fn new(pairs: Vec<(T, f64)>) -> Result<Self, SimError> {
        let total: f64 = pairs.iter().map(|(_, w)| w.max(0.0)).sum();
        if total.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(SimError::Profile("categorical distribution without mass".into()));
        }
        let (items, weights): (Vec<T>, Vec<f64>) = pairs.into_iter().map(|(t, w)| (t, w.max(0.0))).unzip();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let index = WeightedIndex::new(&probs).map_err(|e| SimError::Profile(e.to_string()))?;
        Ok(Categorical { items, probs, index })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        self.items[self.index.sample(rng)].clone()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, f64)> {
        self.items.iter().zip(self.probs.iter().copied())
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct TopicAudience {
    pub gender: Categorical<Gender>,
    pub age: Categorical<AgeBucket>,
    pub region: Categorical<String>,
    /// Mean impressions over a whole sponsorship window.
    pub reach_mean: f64,
    pub reach_cv: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudienceSample {
    pub gender: Gender,
    pub age_bucket: AgeBucket,
    pub region: String,
}

impl TopicAudience {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AudienceSample {
        AudienceSample {
            gender: self.gender.sample(rng),
            age_bucket: self.age.sample(rng),
            region: self.region.sample(rng),
        }
    }

    /// Impressions for one day of a `days`-long window.
    pub fn daily_reach<R: Rng + ?Sized>(&self, days: u32, rng: &mut R) -> u32 {
        let mean = self.reach_mean / f64::from(days.max(1));
        let sd = self.reach_cv * mean;
        let x = if sd > 0.0 {
            Normal::new(mean, sd).expect("finite parameters").sample(rng)
        } else {
            mean
        };
        x.max(0.0).round() as u32
    }
}

/// Delivery distribution of sponsored impressions, per topic.
#[derive(Debug, Clone)]
pub struct SponsorAudienceModel {
    pub topics: BTreeMap<String, TopicAudience>,
}

impl SponsorAudienceModel {
    /// Averages the table's posts per topic. Unreported regions count as zero;
    /// the unreported remainder of each breakdown becomes [`OTHER_REGION`] or
    /// [`Gender::Unspecified`].
    pub fn from_table(table: &SponsoredAudienceTable, reach_cv: f64) -> Result<Self, SimError> {
        let ages: Vec<AgeBucket> = table
            .age_buckets
            .iter()
            .map(|b| b.parse().map_err(|e: crate::domain::DomainError| SimError::Profile(e.to_string())))
            .collect::<Result<_, _>>()?;
        let mut by_topic: BTreeMap<&str, Vec<_>> = BTreeMap::new();
        for p in &table.posts {
            by_topic.entry(p.topic.as_str()).or_default().push(p);
        }
        let mut topics = BTreeMap::new();
        for (topic, rows) in by_topic {
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&crate::fixtures::SponsoredPostAudience) -> f64| {
                rows.iter().map(|r| f(r)).sum::<f64>() / n
            };
            let women = mean(&|r| r.women);
            let men = mean(&|r| r.men);
            let gender = Categorical::new(vec![
                (Gender::F, women),
                (Gender::M, men),
                (Gender::Unspecified, (100.0 - women - men).max(0.0)),
            ])?;
            let age = Categorical::new(
                ages.iter().enumerate().map(|(i, &b)| (b, mean(&|r| r.age.get(i).copied().unwrap_or(0.0)))).collect(),
            )?;
            let mut names: Vec<&String> = rows.iter().flat_map(|r| r.regions.keys()).collect();
            names.sort();
            names.dedup();
            let mut regions: Vec<(String, f64)> = names
                .into_iter()
                .map(|name| (name.clone(), mean(&|r| r.regions.get(name).copied().unwrap_or(0.0))))
                .collect();
            let covered: f64 = regions.iter().map(|(_, w)| w).sum();
            regions.push((OTHER_REGION.to_string(), (100.0 - covered).max(0.0)));
            topics.insert(
                topic.to_string(),
                TopicAudience {
                    gender,
                    age,
                    region: Categorical::new(regions)?,
                    reach_mean: mean(&|r| f64::from(r.audience)),
                    reach_cv,
                },
            );
        }
        Ok(SponsorAudienceModel { topics })
    }

    pub fn topic(&self, name: &str) -> Option<&TopicAudience> {
        self.topics.get(name)
    }
}

/// Sampled viewers of one day of sponsorship for `post`.
pub fn deliver_sponsorship<R: Rng + ?Sized>(
    post: &Post,
    now: SimTime,
    audience: &TopicAudience,
    rng: &mut R,
) -> Result<Vec<AudienceSample>, SimError> {
    let window = post.sponsored_window.filter(|w| w.contains(now)).ok_or(SimError::WindowClosed(post.id))?;
    let reach = audience.daily_reach(window.days(), rng);
    Ok((0..reach).map(|_| audience.sample(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixtures;
    use crate::rng::seeded_rng;

    fn model(cv: f64) -> SponsorAudienceModel {
        SponsorAudienceModel::from_table(&Fixtures::builtin().sponsored_audience, cv).unwrap()
    }

    #[test]
    fn categorical_marginals_sum_to_one() {
        for t in model(0.2).topics.values() {
            assert!((t.gender.total() - 1.0).abs() < 1e-9);
            assert!((t.age.total() - 1.0).abs() < 1e-9);
            assert!((t.region.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn car_audience_is_mostly_male() {
        let m = model(0.2);
        let car = m.topic("car").unwrap();
        let mut rng = seeded_rng(1);
        let men = (0..10_000).filter(|_| car.sample(&mut rng).gender == Gender::M).count();
        let expect = (89.5 + 90.7 + 93.6) / 3.0 / 100.0;
        assert!((men as f64 / 1e4 - expect).abs() < 0.02);
    }

    #[test]
    fn zero_variance_reach_is_exact() {
        let m = model(0.0);
        let cat = m.topic("cat").unwrap();
        let expect = (cat.reach_mean / 7.0).round() as u32;
        let mut rng = seeded_rng(2);
        assert!((0..20).all(|_| cat.daily_reach(7, &mut rng) == expect));
    }
}
