//! Post generation: the four strategies, caption assembly and the stub
//! environment that stands in for detectors, language models and stock sites.

mod art;
mod caption;
mod filter;
mod generate;
mod hashtags;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use art::{art_prompt, normalize_articles};
pub use caption::{attach_cta, insert_emojis, sample_quote, EmojiText};
pub use filter::{is_english, keyword_filter, KeepDecision, MIN_KEEP_SCORE, MIN_TOP_SCORE};
pub use generate::{
    generate_post, owner_review, review_with_retries, AppealModel, BetaParams, FeedItem,
    ImageSource, PostDraft, ReviewOutcome, ReviewPolicy, StockLibrary, StubEnvironment,
    DEFAULT_REVIEW_RETRIES, INSTA_FEED_BUDGET,
};
pub use hashtags::{select_hashtags, BOTTOM_PICKS, CAPTION_HASHTAGS, TOP_PICKS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContentError {
    #[error("hashtag pool has {0} entries, need at least 15")]
    InsufficientPool(usize),
    #[error("empty {0} pool")]
    EmptyPool(&'static str),
    #[error("no detections")]
    EmptyDetections,
    #[error("unknown style `{0}`")]
    UnknownStyle(String),
    #[error("unknown medium `{0}`")]
    UnknownMedium(String),
    #[error("every item of the top-25 feed for `{0}` was discarded")]
    ExhaustedFeed(String),
    #[error("stock library `{0}` has no unused images left")]
    ExhaustedStockLibrary(String),
    #[error("owner rejected {0} regenerated drafts")]
    RetriesExhausted(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AiClass {
    AI,
    NonAI,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GenerationStrategy {
    InstaModel,
    ArtModel,
    UnsplashModel,
    QuotesModel,
}

impl GenerationStrategy {
    pub const ALL: [GenerationStrategy; 4] = [
        GenerationStrategy::InstaModel,
        GenerationStrategy::ArtModel,
        GenerationStrategy::UnsplashModel,
        GenerationStrategy::QuotesModel,
    ];

    pub fn ai_class(self) -> AiClass {
        match self {
            GenerationStrategy::InstaModel | GenerationStrategy::ArtModel => AiClass::AI,
            GenerationStrategy::UnsplashModel | GenerationStrategy::QuotesModel => AiClass::NonAI,
        }
    }

    pub fn is_ai(self) -> bool {
        self.ai_class() == AiClass::AI
    }

    /// Caption is written before the image.
    pub fn caption_first(self) -> bool {
        self.is_ai()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caption {
    pub body: String,
    pub hashtags: Vec<String>,
    pub cta: Option<String>,
    pub emoji_count: u32,
    pub is_quote: bool,
}

impl Caption {
    /// Caption as it would be published: body, then the hashtag block.
    pub fn render(&self) -> String {
        let tags: Vec<String> = self.hashtags.iter().map(|t| format!("#{t}")).collect();
        format!("{}\n{}", self.body, tags.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentDescriptor {
    pub appeal: f64,
    pub topic_affinity: f64,
    pub caption: Caption,
    pub provenance: GenerationStrategy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub label: String,
    pub score: f64,
}

impl Detection {
    pub fn new(label: impl Into<String>, score: f64) -> Self {
        Detection { label: label.into(), score }
    }
}
