use std::collections::BTreeMap;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, LogNormal};

use super::audience::{AudienceSample, Categorical};
use super::BehaviorProfile;
use crate::domain::{AgeBucket, Agent, AgentCategory, AgentId, Gender, Topic};

/// Regions of the generated population with relative weights.
const REGIONS: [(&str, f64); 16] = [
    ("Lombardia", 12.0),
    ("Campania", 10.0),
    ("Lazio", 8.0),
    ("Sicilia", 8.0),
    ("Puglia", 7.0),
    ("Veneto", 7.0),
    ("Piemonte", 5.0),
    ("Emilia-Romagna", 5.0),
    ("Toscana", 4.0),
    ("India", 9.0),
    ("Bangladesh", 7.0),
    ("Japan", 6.0),
    ("United States", 5.0),
    ("Brazil", 4.0),
    ("Indonesia", 4.0),
    ("Turkey", 3.0),
];

const AGE_WEIGHTS: [f64; 7] = [2.0, 30.0, 30.0, 17.0, 11.0, 6.0, 4.0];

fn lognormal<R: Rng + ?Sized>(median: f64, sigma: f64, rng: &mut R) -> f64 {
    LogNormal::new(median.ln(), sigma).expect("valid log-normal").sample(rng)
}

fn base_agent(id: AgentId, category: AgentCategory) -> Agent {
    Agent {
        id,
        category,
        gender: Gender::Unspecified,
        age_bucket: AgeBucket::Age18To24,
        region: String::new(),
        follower_count: 0,
        following_count: 0,
        post_count: 0,
        has_real_picture: true,
        username_entropy: 0.5,
        interests: BTreeMap::new(),
        activity_rate: 0.0,
        trigger_tags: Vec::new(),
        passive: false,
    }
}

struct Demographics {
    gender: Categorical<Gender>,
    age: Categorical<AgeBucket>,
    region: Categorical<String>,
}

impl Demographics {
    fn new() -> Self {
        Demographics {
            gender: Categorical::new(vec![(Gender::F, 0.48), (Gender::M, 0.48), (Gender::Unspecified, 0.04)])
                .expect("positive weights"),
            age: Categorical::new(AgeBucket::ALL.into_iter().zip(AGE_WEIGHTS).collect()).expect("positive weights"),
            region: Categorical::new(REGIONS.iter().map(|&(r, w)| (r.to_string(), w)).collect())
                .expect("positive weights"),
        }
    }

    fn apply<R: Rng + ?Sized>(&self, a: &mut Agent, rng: &mut R) {
        a.gender = self.gender.sample(rng);
        a.age_bucket = self.age.sample(rng);
        a.region = self.region.sample(rng);
    }
}

fn real_person<R: Rng + ?Sized>(id: AgentId, topics: &[Arc<Topic>], profile: &BehaviorProfile, rng: &mut R) -> Agent {
    let mut a = base_agent(id, AgentCategory::RealPerson);
    a.follower_count = lognormal(250.0, 0.8, rng).min(999.0) as u32;
    a.following_count = rng.random_range(80..900);
    a.post_count = if rng.random_bool(0.05) { rng.random_range(0..5) } else { rng.random_range(5..600) };
    a.has_real_picture = rng.random_bool(0.95);
    a.username_entropy = if rng.random_bool(0.05) { rng.random_range(0.8..1.0) } else { rng.random_range(0.2..0.75) };
    for t in topics {
        if rng.random_bool(profile.topic(&t.name).interest_share) {
            a.interests.insert(t.name.clone(), rng.random_range(0.1..0.7));
        }
    }
    a.activity_rate = profile.discovery_rate * rng.random_range(0.5..1.5);
    a
}

fn page<R: Rng + ?Sized>(id: AgentId, focus: &Topic, topics: &[Arc<Topic>], profile: &BehaviorProfile, rng: &mut R) -> Agent {
    let mut a = base_agent(id, AgentCategory::PageInfluencer);
    a.follower_count = lognormal(4000.0, 1.2, rng).min(2_000_000.0) as u32;
    a.following_count = rng.random_range(50..1500);
    a.post_count = rng.random_range(40..3000);
    a.username_entropy = rng.random_range(0.2..0.7);
    a.interests.insert(focus.name.clone(), rng.random_range(0.85..=1.0));
    for t in topics.iter().filter(|t| t.name != focus.name) {
        if rng.random_bool(profile.topic(&t.name).interest_share * 0.5) {
            a.interests.insert(t.name.clone(), rng.random_range(0.05..0.4));
        }
    }
    a.activity_rate = profile.discovery_rate * rng.random_range(0.8..2.0);
    a
}

fn bot_profile<R: Rng + ?Sized>(a: &mut Agent, rng: &mut R) {
    a.follower_count = rng.random_range(0..60);
    a.following_count = rng.random_range(600..7500);
    a.post_count = if rng.random_bool(0.8) { rng.random_range(0..5) } else { rng.random_range(5..30) };
    a.has_real_picture = rng.random_bool(0.15);
    a.username_entropy = if rng.random_bool(0.8) { rng.random_range(0.8..1.0) } else { rng.random_range(0.5..0.8) };
}

fn spam_bot<R: Rng + ?Sized>(id: AgentId, watch: &Topic, tags: u32, rng: &mut R) -> Agent {
    let mut a = base_agent(id, AgentCategory::SpamBot);
    bot_profile(&mut a, rng);
    let pool: Vec<&str> = watch.hashtag_pool.iter().map(|h| h.tag.as_str()).collect();
    a.trigger_tags = pool.choose_multiple(rng, tags as usize).map(|s| s.to_string()).collect();
    a.trigger_tags.sort();
    a
}

/// Agents of the simulated network, ids `0..size`.
///
/// Categories follow the profile's mix exactly (rounded); pages and bots are
/// spread over topics by the per-topic page and bot weights.
pub fn generate_population<R: Rng + ?Sized>(
    size: usize,
    profile: &BehaviorProfile,
    topics: &[Arc<Topic>],
    rng: &mut R,
) -> Vec<Agent> {
    let mix = profile.population;
    let total = mix.real + mix.page + mix.bot;
    let n_page = (size as f64 * mix.page / total).round() as usize;
    let n_bot = ((size as f64 * mix.bot / total).round() as usize).min(size - n_page);
    let mut categories = vec![AgentCategory::RealPerson; size - n_page - n_bot];
    categories.extend(std::iter::repeat_n(AgentCategory::PageInfluencer, n_page));
    categories.extend(std::iter::repeat_n(AgentCategory::SpamBot, n_bot));
    categories.shuffle(rng);

    let demo = Demographics::new();
    let weights = |f: fn(&super::TopicBehavior) -> f64| {
        WeightedIndex::new(topics.iter().map(|t| f(&profile.topic(&t.name)).max(1e-12))).ok()
    };
    let page_topic = weights(|b| b.page_weight);
    let bot_topic = weights(|b| b.bot_weight);

    categories
        .into_iter()
        .enumerate()
        .map(|(i, cat)| {
            let id = AgentId(i as u32);
            let mut a = match (cat, &page_topic, &bot_topic) {
                (AgentCategory::PageInfluencer, Some(w), _) => page(id, &topics[w.sample(rng)], topics, profile, rng),
                (AgentCategory::SpamBot, _, Some(w)) => spam_bot(id, &topics[w.sample(rng)], mix.bot_tags, rng),
                _ => real_person(id, topics, profile, rng),
            };
            demo.apply(&mut a, rng);
            a
        })
        .collect()
}

/// Accounts sold as followers: bot-like and never acting.
pub fn generate_passive<R: Rng + ?Sized>(first_id: u32, n: usize, rng: &mut R) -> Vec<Agent> {
    let demo = Demographics::new();
    (0..n)
        .map(|i| {
            let mut a = base_agent(AgentId(first_id + i as u32), AgentCategory::SpamBot);
            bot_profile(&mut a, rng);
            demo.apply(&mut a, rng);
            a.passive = true;
            a
        })
        .collect()
}

/// A real person reached by a sponsored impression.
pub fn sponsored_viewer<R: Rng + ?Sized>(
    id: AgentId,
    sample: &AudienceSample,
    topic: &str,
    affinity: f64,
    rng: &mut R,
) -> Agent {
    let mut a = base_agent(id, AgentCategory::RealPerson);
    a.gender = sample.gender;
    a.age_bucket = sample.age_bucket;
    a.region = sample.region.clone();
    a.follower_count = lognormal(250.0, 0.8, rng).min(999.0) as u32;
    a.following_count = rng.random_range(80..900);
    a.post_count = rng.random_range(5..600);
    a.username_entropy = rng.random_range(0.2..0.75);
    a.interests.insert(topic.to_string(), affinity);
    a
}
