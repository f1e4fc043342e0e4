//! Data files compiled into the library, plus the parsers that read them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use serde::Deserialize;
use thiserror::Error;

use crate::domain::{DomainError, Hashtag, Topic};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("{file}:{line}: {reason}")]
    Malformed { file: String, line: usize, reason: String },
    #[error("{file}: {source}")]
    Toml { file: String, source: toml::de::Error },
    #[error("{file}: {source}")]
    Csv { file: String, source: csv::Error },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

pub const HASHTAGS_FOOD: &str = include_str!("../fixtures/hashtags/food.tsv");
pub const HASHTAGS_CAT: &str = include_str!("../fixtures/hashtags/cat.tsv");
pub const HASHTAGS_CAR: &str = include_str!("../fixtures/hashtags/car.tsv");
pub const QUOTES: &str = include_str!("../fixtures/quotes.tsv");
pub const CTA: &str = include_str!("../fixtures/cta.txt");
pub const EMOJI_MAP: &str = include_str!("../fixtures/emoji_map.tsv");
pub const SYNONYMS: &str = include_str!("../fixtures/synonyms.tsv");
pub const JOY_EMOJIS: &str = include_str!("../fixtures/joy_emojis.txt");
pub const STYLES: &str = include_str!("../fixtures/styles.txt");
pub const MEDIA: &str = include_str!("../fixtures/media.txt");
pub const SPAM_COMMENTS: &str = include_str!("../fixtures/spam_comments.txt");
pub const SPAM_PATTERNS: &str = include_str!("../fixtures/spam_patterns.txt");
pub const SPAM_BOT_TEMPLATES: &str = include_str!("../fixtures/spam_bot_templates.txt");
pub const LEGIT_COMMENTS: &str = include_str!("../fixtures/legit_comments.txt");
pub const KEYWORD_EXCLUSIONS: &str = include_str!("../fixtures/keyword_exclusions.txt");
pub const STOPWORDS: &str = include_str!("../fixtures/stopwords.txt");
pub const LABELED_COMMENTS: &str = include_str!("../fixtures/labeled_comments.csv");
pub const SPONSORED_AUDIENCE: &str = include_str!("../fixtures/sponsored_audience.toml");
pub const GROUP_TARGETS: &str = include_str!("../fixtures/group_targets.csv");
pub const PAPER_CALIBRATED_PROFILE: &str =
    include_str!("../fixtures/profiles/paper-calibrated.toml");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quote {
    pub text: String,
    pub author: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct LabeledComment {
    pub text: String,
    pub latency_seconds: u32,
    pub label: String,
}

impl LabeledComment {
    pub fn is_spam(&self) -> bool {
        self.label == "spam"
    }
}

/// One sponsored post's audience breakdown, percentages in [0, 100].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SponsoredPostAudience {
    pub honeypot: String,
    pub topic: String,
    pub audience: u32,
    pub likes: u32,
    pub women: f64,
    pub men: f64,
    pub age: Vec<f64>,
    pub regions: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SponsoredAudienceTable {
    pub age_buckets: Vec<String>,
    #[serde(rename = "post")]
    pub posts: Vec<SponsoredPostAudience>,
}

/// Non-empty lines that are not `#` comments, trimmed.
pub fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_lines(text: &str) -> Vec<String> {
    records(text).map(|(_, l)| l.to_string()).collect()
}

fn split_tab<'a>(file: &str, line: usize, l: &'a str) -> Result<(&'a str, &'a str), FixtureError> {
    l.split_once('\t').ok_or_else(|| FixtureError::Malformed {
        file: file.to_string(),
        line,
        reason: "expected two tab-separated fields".into(),
    })
}

pub fn parse_tsv_map(file: &str, text: &str) -> Result<BTreeMap<String, String>, FixtureError> {
    records(text)
        .map(|(n, l)| {
            let (k, v) = split_tab(file, n, l)?;
            Ok((k.trim().to_lowercase(), v.trim().to_string()))
        })
        .collect()
}

pub fn parse_hashtags(file: &str, text: &str) -> Result<Vec<Hashtag>, FixtureError> {
    records(text)
        .map(|(n, l)| {
            let (tag, count) = split_tab(file, n, l)?;
            let coverage_count = count.trim().parse().map_err(|_| FixtureError::Malformed {
                file: file.to_string(),
                line: n,
                reason: format!("bad coverage count `{count}`"),
            })?;
            Ok(Hashtag { tag: tag.trim().to_string(), coverage_count })
        })
        .collect()
}

pub fn parse_quotes(file: &str, text: &str) -> Result<Vec<Quote>, FixtureError> {
    records(text)
        .map(|(n, l)| {
            let (t, a) = split_tab(file, n, l)?;
            Ok(Quote { text: t.to_string(), author: a.to_string() })
        })
        .collect()
}

pub fn parse_labeled_comments(text: &str) -> Result<Vec<LabeledComment>, FixtureError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|source| FixtureError::Csv { file: "labeled_comments.csv".into(), source })
}

pub fn parse_sponsored_audience(text: &str) -> Result<SponsoredAudienceTable, FixtureError> {
    toml::from_str(text)
        .map_err(|source| FixtureError::Toml { file: "sponsored_audience.toml".into(), source })
}

/// Builds a topic from a ranked pool whose first entry is the topic's own tag.
pub fn topic_from_pool(name: &str, pool: Vec<Hashtag>) -> Result<Topic, FixtureError> {
    let coverage = pool.first().map(|h| h.coverage_count).unwrap_or(0);
    Ok(Topic::new(name, coverage, pool)?)
}

/// Every built-in data set, parsed once.
#[derive(Debug, Clone)]
pub struct Fixtures {
    pub topics: Vec<Arc<Topic>>,
    pub quotes: Vec<Quote>,
    pub cta: Vec<String>,
    pub emoji_map: BTreeMap<String, String>,
    pub synonyms: BTreeMap<String, String>,
    pub joy_emojis: Vec<String>,
    pub styles: Vec<String>,
    pub media: Vec<String>,
    pub spam_comments: Vec<String>,
    pub spam_patterns: Vec<String>,
    pub spam_bot_templates: Vec<String>,
    pub legit_comments: Vec<String>,
    pub keyword_exclusions: BTreeSet<String>,
    pub stopwords: BTreeSet<String>,
    pub sponsored_audience: SponsoredAudienceTable,
}

impl Fixtures {
    pub fn load() -> Result<Self, FixtureError> {
        let topics = [("food", HASHTAGS_FOOD), ("cat", HASHTAGS_CAT), ("car", HASHTAGS_CAR)]
            .into_iter()
            .map(|(name, text)| {
                let pool = parse_hashtags(&format!("hashtags/{name}.tsv"), text)?;
                topic_from_pool(name, pool).map(Arc::new)
            })
            .collect::<Result<_, _>>()?;
        let lower_set = |t: &str| parse_lines(t).into_iter().map(|w| w.to_lowercase()).collect();
        Ok(Fixtures {
            topics,
            quotes: parse_quotes("quotes.tsv", QUOTES)?,
            cta: parse_lines(CTA),
            emoji_map: parse_tsv_map("emoji_map.tsv", EMOJI_MAP)?,
            synonyms: parse_tsv_map("synonyms.tsv", SYNONYMS)?,
            joy_emojis: parse_lines(JOY_EMOJIS),
            styles: parse_lines(STYLES),
            media: parse_lines(MEDIA),
            spam_comments: parse_lines(SPAM_COMMENTS),
            spam_patterns: parse_lines(SPAM_PATTERNS),
            spam_bot_templates: parse_lines(SPAM_BOT_TEMPLATES),
            legit_comments: parse_lines(LEGIT_COMMENTS),
            keyword_exclusions: lower_set(KEYWORD_EXCLUSIONS),
            stopwords: lower_set(STOPWORDS),
            sponsored_audience: parse_sponsored_audience(SPONSORED_AUDIENCE)?,
        })
    }

    /// Shared instance; the embedded files are validated by the test suite.
    pub fn builtin() -> &'static Fixtures {
        static CELL: OnceLock<Fixtures> = OnceLock::new();
        CELL.get_or_init(|| Fixtures::load().expect("embedded fixtures are well formed"))
    }

    pub fn topic(&self, name: &str) -> Option<&Arc<Topic>> {
        self.topics.iter().find(|t| t.name == name)
    }
}
