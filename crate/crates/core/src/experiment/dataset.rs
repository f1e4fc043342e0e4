use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::classify::ProfileView;
use crate::content::GenerationStrategy;
use crate::domain::{AgeBucket, AgentCategory, Gender, PostId, StrategyGroup};
use crate::plans::Plan;
use crate::sim::RunRecord;

fn parsed<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: serde::Deserializer<'de>,
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
}

pub const HONEYPOT_COLUMNS: [&str; 4] = ["honeypot", "topic", "strategies", "plan"];

/// Identity of a honeypot as written to `honeypots.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoneypotRow {
    pub id: String,
    pub topic: String,
    pub strategies: Vec<GenerationStrategy>,
    pub plan: Plan,
}

impl HoneypotRow {
    pub fn strategy_group(&self) -> StrategyGroup {
        StrategyGroup::of(&self.strategies)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub day: u32,
    pub followers: u32,
    pub cum_likes: u64,
    pub cum_comments: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostRow {
    pub honeypot: String,
    pub post: PostId,
    pub day: u32,
    pub minute: u32,
    pub likes: u32,
    pub comments: u32,
    pub sponsored_start: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentRow {
    pub honeypot: String,
    #[serde(deserialize_with = "parsed")]
    pub post: PostId,
    pub latency_seconds: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowerRow {
    pub honeypot: String,
    pub purchased: bool,
    /// Simulator ground truth.
    pub category: AgentCategory,
    pub gender: Gender,
    pub age: AgeBucket,
    pub region: String,
    pub profile: ProfileView,
    pub topic_specific: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub config_hash: String,
    pub horizon_days: u32,
}

/// The analysable content of one replicate. Built from the CSV text in both
/// directions, so a record and its files yield identical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateData {
    pub meta: RunMeta,
    pub honeypots: Vec<HoneypotRow>,
    /// Parallel to `honeypots`.
    pub snapshots: Vec<Vec<SnapshotRow>>,
    /// Publication order within each honeypot.
    pub posts: Vec<PostRow>,
    pub comments: Vec<CommentRow>,
    pub followers: Vec<FollowerRow>,
}

/// The text of every file of a replicate, keyed by relative path.
struct Files {
    meta: String,
    honeypots: String,
    snapshots: Vec<(String, String)>,
    events: String,
    posts: String,
    comments: String,
    followers: String,
}

fn files_of(r: &RunRecord) -> Files {
    let meta = RunMeta { seed: r.seed, config_hash: r.config_hash.clone(), horizon_days: r.horizon_days };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(HONEYPOT_COLUMNS).expect("in-memory write");
    for h in &r.honeypots {
        let strategies: Vec<String> = h.strategy_mix.iter().map(|s| format!("{s:?}")).collect();
        w.write_record([h.id.as_str(), h.topic.name.as_str(), &strategies.join("+"), h.plan.plan.label()])
            .expect("in-memory write");
    }
    Files {
        meta: serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n",
        honeypots: String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"),
        snapshots: (0..r.honeypots.len())
            .map(|i| (format!("snapshots/{}.csv", r.honeypots[i].id), r.snapshot_csv(i)))
            .collect(),
        events: r.events_csv(),
        posts: r.posts_csv(),
        comments: r.comments_csv(),
        followers: r.followers_csv(),
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::Reader::from_reader(text.as_bytes())
}

fn rows<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<Vec<T>, ExperimentError> {
    reader(text)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| ExperimentError::format(file, e))
}

fn parse_named<T>(file: &str, value: &str, all: &[T], label: impl Fn(&T) -> String) -> Result<T, ExperimentError>
where
    T: Copy,
{
    all.iter().copied().find(|x| label(x) == value).ok_or_else(|| ExperimentError::format(file, format!("unknown value `{value}`")))
}

#[derive(Deserialize)]
struct RawHoneypot {
    honeypot: String,
    topic: String,
    strategies: String,
    plan: String,
}

#[derive(Deserialize)]
struct RawFollower {
    honeypot: String,
    purchased: bool,
    category: String,
    gender: String,
    age: String,
    region: String,
    follower_count: u32,
    following_count: u32,
    post_count: u32,
    has_real_picture: bool,
    username_entropy: f64,
    topic_specific: bool,
}

const CATEGORIES: [AgentCategory; 3] = [AgentCategory::RealPerson, AgentCategory::PageInfluencer, AgentCategory::SpamBot];

fn parse_files(f: &Files) -> Result<ReplicateData, ExperimentError> {
    let meta: RunMeta = serde_json::from_str(&f.meta).map_err(|e| ExperimentError::format("meta.json", e))?;
    let honeypots = rows::<RawHoneypot>("honeypots.csv", &f.honeypots)?
        .into_iter()
        .map(|r| {
            let strategies = r
                .strategies
                .split('+')
                .map(|s| parse_named("honeypots.csv", s, &GenerationStrategy::ALL, |g| format!("{g:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            let plan = parse_named("honeypots.csv", &r.plan, &Plan::ALL, |p| p.label().to_string())?;
            Ok(HoneypotRow { id: r.honeypot, topic: r.topic, strategies, plan })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    if honeypots.len() != f.snapshots.len() {
        return Err(ExperimentError::format("snapshots", "one snapshot file per honeypot expected"));
    }

    #[derive(Deserialize)]
    struct RawSnapshot {
        honeypot: String,
        day: u32,
        followers: u32,
        cum_likes: u64,
        cum_comments: u64,
    }
    let snapshots = f
        .snapshots
        .iter()
        .zip(&honeypots)
        .map(|((name, text), h)| {
            rows::<RawSnapshot>(name, text)?
                .into_iter()
                .map(|s| {
                    if s.honeypot != h.id {
                        return Err(ExperimentError::format(name, format!("row for `{}`", s.honeypot)));
                    }
                    Ok(SnapshotRow { day: s.day, followers: s.followers, cum_likes: s.cum_likes, cum_comments: s.cum_comments })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    #[derive(Deserialize)]
    struct RawPost {
        honeypot: String,
        #[serde(deserialize_with = "parsed")]
        post: PostId,
        day: u32,
        minute: u32,
        likes: u32,
        comments: u32,
        sponsored_start: Option<u32>,
    }
    let posts = rows::<RawPost>("posts.csv", &f.posts)?
        .into_iter()
        .map(|p| PostRow {
            honeypot: p.honeypot,
            post: p.post,
            day: p.day,
            minute: p.minute,
            likes: p.likes,
            comments: p.comments,
            sponsored_start: p.sponsored_start,
        })
        .collect();
    let comments = rows::<CommentRow>("comments.csv", &f.comments)?;
    let followers = rows::<RawFollower>("followers.csv", &f.followers)?
        .into_iter()
        .map(|r| {
            let file = "followers.csv";
            Ok(FollowerRow {
                category: parse_named(file, &r.category, &CATEGORIES, |c| format!("{c:?}"))?,
                gender: r.gender.parse().map_err(|e| ExperimentError::format(file, e))?,
                age: r.age.parse().map_err(|e| ExperimentError::format(file, e))?,
                honeypot: r.honeypot,
                purchased: r.purchased,
                region: r.region,
                profile: ProfileView {
                    follower_count: r.follower_count,
                    following_count: r.following_count,
                    post_count: r.post_count,
                    has_real_picture: r.has_real_picture,
                    username_entropy: r.username_entropy,
                },
                topic_specific: r.topic_specific,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(ReplicateData { meta, honeypots, snapshots, posts, comments, followers })
}

impl ReplicateData {
    pub fn from_record(r: &RunRecord) -> Result<Self, ExperimentError> {
        parse_files(&files_of(r))
    }

    pub fn posts_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a PostRow> + 'a {
        self.posts.iter().filter(move |p| p.honeypot == id)
    }

    pub fn final_followers(&self, h: usize) -> u32 {
        self.snapshots[h].last().map_or(0, |s| s.followers)
    }
}

fn write(dir: &Path, rel: &str, text: &str) -> Result<(), ExperimentError> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| ExperimentError::io(parent, e))?;
    }
    fs::write(&path, text).map_err(|e| ExperimentError::io(&path, e))
}

fn read(dir: &Path, rel: &str) -> Result<String, ExperimentError> {
    let path = dir.join(rel);
    fs::read_to_string(&path).map_err(|e| ExperimentError::io(&path, e))
}

/// Writes `meta.json`, `honeypots.csv`, `events.csv`, `posts.csv`,
/// `comments.csv`, `followers.csv` and `snapshots/<id>.csv` into `dir`.
pub fn write_replicate(record: &RunRecord, dir: &Path) -> Result<ReplicateData, ExperimentError> {
    let f = files_of(record);
    write(dir, "meta.json", &f.meta)?;
    write(dir, "honeypots.csv", &f.honeypots)?;
    write(dir, "events.csv", &f.events)?;
    write(dir, "posts.csv", &f.posts)?;
    write(dir, "comments.csv", &f.comments)?;
    write(dir, "followers.csv", &f.followers)?;
    for (rel, text) in &f.snapshots {
        write(dir, rel, text)?;
    }
    parse_files(&f)
}

/// Reads what [`write_replicate`] wrote. The event log is not needed for analysis and is not read.
pub fn read_replicate(dir: &Path) -> Result<ReplicateData, ExperimentError> {
    let honeypots = read(dir, "honeypots.csv")?;
    let ids = rows::<RawHoneypot>("honeypots.csv", &honeypots)?;
    let snapshots = ids
        .iter()
        .map(|h| {
            let rel = format!("snapshots/{}.csv", h.honeypot);
            read(dir, &rel).map(|t| (rel, t))
        })
        .collect::<Result<Vec<_>, _>>()?;
    parse_files(&Files {
        meta: read(dir, "meta.json")?,
        honeypots,
        snapshots,
        events: String::new(),
        posts: read(dir, "posts.csv")?,
        comments: read(dir, "comments.csv")?,
        followers: read(dir, "followers.csv")?,
    })
}
