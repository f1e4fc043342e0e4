use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use super::{
    art_prompt, attach_cta, insert_emojis, is_english, keyword_filter, sample_quote,
    select_hashtags, Caption, ContentDescriptor, ContentError, Detection, GenerationStrategy,
    KeepDecision,
};
use crate::domain::Topic;
use crate::fixtures::Fixtures;
use crate::rng::seeded_rng;

/// Feed items InstaModel may try before giving up (one pass over the top 25).
pub const INSTA_FEED_BUDGET: usize = 25;
pub const DEFAULT_REVIEW_RETRIES: u32 = 5;

const MAX_KEYWORDS: usize = 4;
const STOCK_CAPACITY: u64 = 100_000;
const UNSPLASH: &str = "unsplash";
const PIXABAY: &str = "pixabay";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Beta::new(self.alpha, self.beta).expect("positive shape parameters").sample(rng)
    }
}

/// Per-strategy Beta distribution of post appeal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppealModel {
    pub insta_model: BetaParams,
    pub art_model: BetaParams,
    pub unsplash_model: BetaParams,
    pub quotes_model: BetaParams,
}

impl AppealModel {
    pub fn get(&self, s: GenerationStrategy) -> BetaParams {
        match s {
            GenerationStrategy::InstaModel => self.insta_model,
            GenerationStrategy::ArtModel => self.art_model,
            GenerationStrategy::UnsplashModel => self.unsplash_model,
            GenerationStrategy::QuotesModel => self.quotes_model,
        }
    }

    pub fn is_valid(&self) -> bool {
        GenerationStrategy::ALL.iter().all(|&s| {
            let p = self.get(s);
            p.alpha > 0.0 && p.beta > 0.0 && p.alpha.is_finite() && p.beta.is_finite()
        })
    }
}

impl Default for AppealModel {
    fn default() -> Self {
        let p = BetaParams { alpha: 2.0, beta: 2.0 };
        AppealModel { insta_model: p, art_model: p, unsplash_model: p, quotes_model: p }
    }
}

/// One of the popular posts InstaModel starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedItem {
    pub caption: String,
    pub detections: Vec<Detection>,
}

/// Image ids handed out at most once each.
#[derive(Debug, Clone, PartialEq)]
pub struct StockLibrary {
    pub name: String,
    pub capacity: u64,
    used: BTreeSet<u64>,
}

impl StockLibrary {
    pub fn new(name: impl Into<String>, capacity: u64) -> Self {
        StockLibrary { name: name.into(), capacity, used: BTreeSet::new() }
    }

    pub fn used(&self) -> &BTreeSet<u64> {
        &self.used
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<u64, ContentError> {
        if self.used.len() as u64 >= self.capacity {
            return Err(ContentError::ExhaustedStockLibrary(self.name.clone()));
        }
        for _ in 0..64 {
            let id = rng.random_range(0..self.capacity);
            if self.used.insert(id) {
                return Ok(id);
            }
        }
        let start = rng.random_range(0..self.capacity);
        let id = (0..self.capacity)
            .map(|k| (start + k) % self.capacity)
            .find(|id| !self.used.contains(id))
            .expect("capacity not reached");
        self.used.insert(id);
        Ok(id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ImageSource {
    TextToImage { prompt: String },
    Stock { library: String, id: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostDraft {
    pub content: ContentDescriptor,
    pub image: ImageSource,
    pub keywords: Vec<String>,
}

/// Deterministic stand-ins for the detector, language models and stock sites.
#[derive(Debug, Clone)]
pub struct StubEnvironment<'f> {
    pub fixtures: &'f Fixtures,
    pub appeal: AppealModel,
    feeds: BTreeMap<String, Vec<FeedItem>>,
    stock: BTreeMap<String, StockLibrary>,
}

const FOREIGN_CAPTIONS: [&str; 6] = [
    "Che bella giornata con gli amici",
    "Buenísimo, nos vemos mañana en casa",
    "Quelle belle journée au soleil",
    "Schönes Wochenende mit Freunden",
    "Ciao ragazzi, guardate che meraviglia",
    "Bom dia meus amigos lindos",
];

const ADJECTIVES: [&str; 8] =
    ["lovely", "sunny", "cozy", "bright", "quiet", "fresh", "golden", "little"];

fn topic_vocabulary(topic: &str) -> Vec<&'static str> {
    match topic {
        "food" => vec!["pasta", "pizza", "salad", "cake", "bread", "cheese", "coffee", "bowl", "plate"],
        "cat" => vec!["cat", "kitten", "sofa", "window", "grass", "toy", "blanket", "basket"],
        "car" => vec!["car", "wheel", "road", "engine", "street", "race", "garage", "sunset"],
        _ => vec![],
    }
}

fn vocabulary(topic: &Topic) -> Vec<String> {
    let v = topic_vocabulary(&topic.name);
    if v.is_empty() {
        vec![topic.name.clone()]
    } else {
        v.into_iter().map(String::from).collect()
    }
}

impl<'f> StubEnvironment<'f> {
    pub fn new(fixtures: &'f Fixtures, appeal: AppealModel) -> Self {
        let stock = [UNSPLASH, PIXABAY]
            .into_iter()
            .map(|n| (n.to_string(), StockLibrary::new(n, STOCK_CAPACITY)))
            .collect();
        StubEnvironment { fixtures, appeal, feeds: BTreeMap::new(), stock }
    }

    /// Environment whose per-topic feeds are generated from `seed`.
    pub fn synthetic(fixtures: &'f Fixtures, appeal: AppealModel, seed: u64) -> Self {
        let mut env = StubEnvironment::new(fixtures, appeal);
        for topic in &fixtures.topics {
            env.refresh_feed(topic, seed);
        }
        env
    }

    pub fn set_feed(&mut self, topic: &str, items: Vec<FeedItem>) {
        self.feeds.insert(topic.to_string(), items);
    }

    pub fn feed(&self, topic: &str) -> &[FeedItem] {
        self.feeds.get(topic).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn stock_library(&self, name: &str) -> Option<&StockLibrary> {
        self.stock.get(name)
    }

    /// Regenerates the 25-item feed of `topic`; about one item in six is not
    /// English and about one in six has a weak top detection.
    pub fn refresh_feed(&mut self, topic: &Topic, seed: u64) {
        let mut rng = seeded_rng(crate::rng::derive_seed(seed, &format!("feed/{}", topic.name)));
        let vocab = vocabulary(topic);
        let items = (0..INSTA_FEED_BUDGET)
            .map(|_| {
                let obj = vocab.choose(&mut rng).expect("non-empty vocabulary");
                let other = vocab.choose(&mut rng).expect("non-empty vocabulary");
                let adj = ADJECTIVES.choose(&mut rng).expect("non-empty");
                let caption = if rng.random_bool(1.0 / 6.0) {
                    FOREIGN_CAPTIONS.choose(&mut rng).expect("non-empty").to_string()
                } else {
                    format!("My {adj} {obj} and the {other} on a lazy afternoon, credits to a friend")
                };
                let mut detections = vec![Detection::new(obj.clone(), rng.random_range(0.1..0.95))];
                for _ in 0..3 {
                    let label = vocab.choose(&mut rng).expect("non-empty vocabulary");
                    detections.push(Detection::new(label.clone(), rng.random_range(0.0..0.2)));
                }
                FeedItem { caption, detections }
            })
            .collect();
        self.set_feed(&topic.name, items);
    }

    fn draw_stock<R: Rng + ?Sized>(&mut self, library: &str, rng: &mut R) -> Result<u64, ContentError> {
        self.stock
            .entry(library.to_string())
            .or_insert_with(|| StockLibrary::new(library, STOCK_CAPACITY))
            .draw(rng)
    }

    fn content_words(&self, caption: &str) -> Vec<String> {
        caption
            .split_whitespace()
            .filter(|w| !w.starts_with('#') && !w.starts_with('@'))
            .map(|w| w.trim_matches(|c: char| !c.is_alphabetic()).to_lowercase())
            .filter(|w| {
                w.chars().count() >= 3
                    && w.chars().all(char::is_alphabetic)
                    && !self.fixtures.stopwords.contains(w)
                    && !self.fixtures.keyword_exclusions.contains(w)
            })
            .collect()
    }
}

fn keyword_to_text(keywords: &[String]) -> String {
    match keywords {
        [] => String::new(),
        [k] => format!("A lovely {k} to start the day."),
        [k, rest @ ..] => {
            let tail: Vec<&str> = rest.iter().map(String::as_str).collect();
            format!("A lovely {k} with {}.", tail.join(" and "))
        }
    }
}

fn rephrase(description: &str) -> String {
    format!("Just {description}, nothing more to ask.")
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

struct Body {
    text: String,
    keywords: Vec<String>,
    image: ImageSource,
    affinity: f64,
    is_quote: bool,
}

fn insta_body<R: Rng + ?Sized>(
    topic: &Topic,
    env: &StubEnvironment<'_>,
    rng: &mut R,
) -> Result<Body, ContentError> {
    let feed = env.feed(&topic.name);
    let mut order: Vec<usize> = (0..feed.len().min(INSTA_FEED_BUDGET)).collect();
    order.shuffle(rng);
    for i in order {
        let item = &feed[i];
        if !is_english(&item.caption, &env.fixtures.stopwords) {
            continue;
        }
        let kept = match keyword_filter(&item.detections) {
            Ok(KeepDecision::Keep(kept)) => kept,
            Ok(KeepDecision::Discard) | Err(_) => continue,
        };
        let top = item.detections.iter().map(|d| d.score).fold(0.0, f64::max);
        let mut keywords: Vec<String> = Vec::new();
        for w in kept
            .into_iter()
            .filter(|k| !env.fixtures.keyword_exclusions.contains(&k.to_lowercase()))
            .chain(env.content_words(&item.caption))
        {
            if keywords.len() < MAX_KEYWORDS && !keywords.contains(&w) {
                keywords.push(w);
            }
        }
        let text = keyword_to_text(&keywords);
        return Ok(Body {
            image: ImageSource::TextToImage { prompt: text.clone() },
            text,
            keywords,
            affinity: 0.6 + 0.4 * top,
            is_quote: false,
        });
    }
    Err(ContentError::ExhaustedFeed(topic.name.clone()))
}

/// Runs one strategy's pipeline and draws the draft's appeal.
///
/// InstaModel and ArtModel write the caption and derive the image from it;
/// UnsplashModel and QuotesModel pick a stock image first.
pub fn generate_post<R: Rng + ?Sized>(
    strategy: GenerationStrategy,
    topic: &Topic,
    env: &mut StubEnvironment<'_>,
    rng: &mut R,
) -> Result<PostDraft, ContentError> {
    let fx = env.fixtures;
    let vocab = vocabulary(topic);
    let body = match strategy {
        GenerationStrategy::InstaModel => insta_body(topic, env, rng)?,
        GenerationStrategy::ArtModel => {
            let style = fx.styles.choose(rng).ok_or(ContentError::EmptyPool("style"))?;
            let medium = fx.media.choose(rng).ok_or(ContentError::EmptyPool("medium"))?;
            let prompt = art_prompt(&topic.name, style, medium, &fx.styles, &fx.media)?;
            Body {
                text: format!("{}.", capitalize(&prompt)),
                keywords: vec![topic.name.clone(), style.clone(), medium.clone()],
                image: ImageSource::TextToImage { prompt },
                affinity: 0.9,
                is_quote: false,
            }
        }
        GenerationStrategy::UnsplashModel => {
            let keyword = vocab.choose(rng).expect("non-empty vocabulary").clone();
            let id = env.draw_stock(UNSPLASH, rng)?;
            let adj = ADJECTIVES[(id % ADJECTIVES.len() as u64) as usize];
            Body {
                text: capitalize(&rephrase(&format!("a {adj} {keyword} in natural light"))),
                keywords: vec![keyword],
                image: ImageSource::Stock { library: UNSPLASH.into(), id },
                affinity: 0.95,
                is_quote: false,
            }
        }
        GenerationStrategy::QuotesModel => {
            let keyword = vocab.choose(rng).expect("non-empty vocabulary").clone();
            let id = env.draw_stock(PIXABAY, rng)?;
            let q = sample_quote(&fx.quotes, rng)?;
            Body {
                text: format!("\"{}\" ({})", q.text, q.author),
                keywords: vec![keyword],
                image: ImageSource::Stock { library: PIXABAY.into(), id },
                affinity: 0.85,
                is_quote: true,
            }
        }
    };

    let (text, emoji_count) = if body.is_quote {
        (body.text, 0)
    } else {
        let e = insert_emojis(&body.text, &fx.emoji_map, &fx.synonyms, &fx.joy_emojis, rng);
        (e.text, e.emoji_count)
    };
    let (text, cta) = attach_cta(&text, &fx.cta, rng)?;
    let hashtags = select_hashtags(&topic.hashtag_pool, rng)?;
    let appeal = env.appeal.get(strategy).sample(rng).clamp(0.0, 1.0);
    Ok(PostDraft {
        content: ContentDescriptor {
            appeal,
            topic_affinity: body.affinity.clamp(0.0, 1.0),
            caption: Caption { body: text, hashtags, cta: Some(cta), emoji_count, is_quote: body.is_quote },
            provenance: strategy,
        },
        image: body.image,
        keywords: body.keywords,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReviewPolicy {
    AutoApprove,
    RejectBelowAppeal(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReviewOutcome {
    Approved(PostDraft),
    Regenerate(PostDraft),
}

pub fn owner_review(draft: PostDraft, policy: ReviewPolicy) -> ReviewOutcome {
    match policy {
        ReviewPolicy::RejectBelowAppeal(tau) if draft.content.appeal < tau => {
            ReviewOutcome::Regenerate(draft)
        }
        _ => ReviewOutcome::Approved(draft),
    }
}

/// Reviews `first`, then up to `max_regenerations` replacements from `regenerate`.
pub fn review_with_retries<F>(
    first: PostDraft,
    policy: ReviewPolicy,
    max_regenerations: u32,
    mut regenerate: F,
) -> Result<PostDraft, ContentError>
where
    F: FnMut() -> Result<PostDraft, ContentError>,
{
    let mut draft = first;
    let mut regenerated = 0;
    loop {
        match owner_review(draft, policy) {
            ReviewOutcome::Approved(d) => return Ok(d),
            ReviewOutcome::Regenerate(_) if regenerated == max_regenerations => {
                return Err(ContentError::RetriesExhausted(regenerated));
            }
            ReviewOutcome::Regenerate(_) => {
                regenerated += 1;
                draft = regenerate()?;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{CAPTION_HASHTAGS, GenerationStrategy::*};
    use crate::fixtures::Fixtures;
    use crate::rng::seeded_rng;

    fn env() -> StubEnvironment<'static> {
        StubEnvironment::synthetic(Fixtures::builtin(), AppealModel::default(), 1)
    }

    fn cat() -> &'static Topic {
        Fixtures::builtin().topic("cat").unwrap()
    }

    #[test]
    fn quotes_draft_shape() {
        let mut e = env();
        let d = generate_post(QuotesModel, cat(), &mut e, &mut seeded_rng(3)).unwrap();
        let c = &d.content.caption;
        assert!(c.is_quote);
        assert_eq!(c.emoji_count, 0);
        assert!(c.cta.is_some());
        assert_eq!(c.hashtags.len(), CAPTION_HASHTAGS);
        let joy = &Fixtures::builtin().joy_emojis;
        assert!(joy.iter().all(|j| !c.body.contains(j.as_str())));
    }

    #[test]
    fn every_strategy_produces_a_full_caption() {
        let mut e = env();
        let mut rng = seeded_rng(8);
        for s in GenerationStrategy::ALL {
            for topic in &Fixtures::builtin().topics {
                let d = generate_post(s, topic, &mut e, &mut rng).unwrap();
                assert_eq!(d.content.caption.hashtags.len(), 15);
                assert!((0.0..=1.0).contains(&d.content.appeal));
                assert!((0.0..=1.0).contains(&d.content.topic_affinity));
                assert_eq!(d.content.provenance, s);
                assert_eq!(d.content.caption.is_quote, s == QuotesModel);
                let cta = d.content.caption.cta.as_ref().unwrap();
                assert!(d.content.caption.body.ends_with(cta.as_str()));
            }
        }
    }

    #[test]
    fn insta_exhausts_on_all_discarded_feed() {
        let mut e = env();
        let weak = FeedItem {
            caption: "the cat is on the sofa".into(),
            detections: vec![Detection::new("cat", 0.2)],
        };
        e.set_feed("cat", vec![weak; 25]);
        assert_eq!(
            generate_post(InstaModel, cat(), &mut e, &mut seeded_rng(1)),
            Err(ContentError::ExhaustedFeed("cat".into()))
        );
    }

    #[test]
    fn insta_skips_foreign_captions_and_drops_excluded_words() {
        let mut e = env();
        let foreign = FeedItem {
            caption: FOREIGN_CAPTIONS[0].into(),
            detections: vec![Detection::new("cat", 0.9)],
        };
        let good = FeedItem {
            caption: "the fluffy cat is on the sofa, credits and dm".into(),
            detections: vec![Detection::new("kitten", 0.7), Detection::new("toy", 0.01)],
        };
        let mut items = vec![foreign; 24];
        items.push(good);
        e.set_feed("cat", items);
        let d = generate_post(InstaModel, cat(), &mut e, &mut seeded_rng(2)).unwrap();
        assert_eq!(d.keywords, vec!["kitten", "fluffy", "cat", "sofa"]);
        assert!((d.content.topic_affinity - (0.6 + 0.4 * 0.7)).abs() < 1e-12);
        assert!(matches!(d.image, ImageSource::TextToImage { .. }));
    }

    #[test]
    fn art_prompt_feeds_the_image() {
        let mut e = env();
        let d = generate_post(ArtModel, cat(), &mut e, &mut seeded_rng(5)).unwrap();
        let ImageSource::TextToImage { prompt } = &d.image else { panic!("not generated") };
        assert!(prompt.ends_with("of a cat"));
        assert!(d.content.caption.body.to_lowercase().starts_with(&prompt.to_lowercase()));
    }

    #[test]
    fn stock_ids_never_repeat_across_honeypots() {
        let mut e = env();
        let mut rng = seeded_rng(4);
        let mut ids = BTreeSet::new();
        for i in 0..600 {
            let topic = &Fixtures::builtin().topics[i % 3];
            let s = if i % 2 == 0 { UnsplashModel } else { QuotesModel };
            let d = generate_post(s, topic, &mut e, &mut rng).unwrap();
            let ImageSource::Stock { library, id } = d.image else { panic!("not stock") };
            assert!(ids.insert((library, id)));
        }
    }

    #[test]
    fn small_library_exhausts() {
        let mut lib = StockLibrary::new("tiny", 3);
        let mut rng = seeded_rng(1);
        let got: BTreeSet<u64> = (0..3).map(|_| lib.draw(&mut rng).unwrap()).collect();
        assert_eq!(got, BTreeSet::from([0, 1, 2]));
        assert_eq!(lib.draw(&mut rng), Err(ContentError::ExhaustedStockLibrary("tiny".into())));
    }

    fn draft_with(appeal: f64) -> PostDraft {
        let mut d = generate_post(QuotesModel, cat(), &mut env(), &mut seeded_rng(1)).unwrap();
        d.content.appeal = appeal;
        d
    }

    #[test]
    fn review_policies() {
        let d = draft_with(0.01);
        assert!(matches!(owner_review(d.clone(), ReviewPolicy::AutoApprove), ReviewOutcome::Approved(_)));
        let d = draft_with(0.31);
        assert!(matches!(owner_review(d, ReviewPolicy::RejectBelowAppeal(0.3)), ReviewOutcome::Approved(_)));
        let d = draft_with(0.3);
        assert!(matches!(owner_review(d, ReviewPolicy::RejectBelowAppeal(0.3)), ReviewOutcome::Approved(_)));
    }

    #[test]
    fn review_gives_up_after_five_regenerations() {
        let mut calls = 0;
        let r = review_with_retries(
            draft_with(0.1),
            ReviewPolicy::RejectBelowAppeal(0.9),
            DEFAULT_REVIEW_RETRIES,
            || {
                calls += 1;
                Ok(draft_with(0.1))
            },
        );
        assert_eq!(r, Err(ContentError::RetriesExhausted(5)));
        assert_eq!(calls, 5);
    }

    #[test]
    fn review_accepts_a_later_draft() {
        let mut appeals = vec![0.95, 0.2].into_iter();
        let r = review_with_retries(draft_with(0.1), ReviewPolicy::RejectBelowAppeal(0.5), 5, || {
            Ok(draft_with(appeals.next_back().unwrap()))
        })
        .unwrap();
        assert_eq!(r.content.appeal, 0.95);
    }
}
