use crate::domain::{AgentId, PostId};
use crate::time::SimTime;

pub const FEED_SIZE: usize = 25;
/// e-folding time of feed scores, in days.
pub const SCORE_DECAY_DAYS: f64 = 3.0;

/// A post as seen by the feed ranker. Publication time is in minutes from
/// day 0 and may be negative for posts that predate the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedCandidate {
    pub id: PostId,
    pub likes: u32,
    pub comments: u32,
    pub published_minute: i64,
}

impl FeedCandidate {
    pub fn new(id: PostId, likes: u32, comments: u32, published_at: SimTime) -> Self {
        FeedCandidate { id, likes, comments, published_minute: published_at.total_minutes() as i64 }
    }

    pub fn age_days(&self, now: SimTime) -> f64 {
        (now.total_minutes() as i64 - self.published_minute) as f64 / 1440.0
    }

    /// `(likes + 2 comments) * exp(-age / 3 days)`.
    pub fn score(&self, now: SimTime) -> f64 {
        (f64::from(self.likes) + 2.0 * f64::from(self.comments)) * (-self.age_days(now) / SCORE_DECAY_DAYS).exp()
    }
}

/// The 25 best-scoring candidates, best first; equal scores keep ascending id order.
pub fn rank_top25(candidates: &[FeedCandidate], now: SimTime) -> Vec<FeedCandidate> {
    let mut scored: Vec<(f64, FeedCandidate)> = candidates.iter().map(|c| (c.score(now), *c)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.id.cmp(&b.1.id)));
    scored.into_iter().take(FEED_SIZE).map(|(_, c)| c).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundPost {
    pub post: FeedCandidate,
    pub author: AgentId,
}

/// Ranked feed of one hashtag.
///
/// Scores of two posts decay by the same factor, so their order never
/// changes with time: keeping only the best 25 background posts is exact.
#[derive(Debug, Clone, Default)]
pub struct TagFeed {
    background: Vec<BackgroundPost>,
    current: Vec<FeedCandidate>,
}

impl TagFeed {
    pub fn background(&self) -> &[BackgroundPost] {
        &self.background
    }

    pub fn current(&self) -> &[FeedCandidate] {
        &self.current
    }

    pub fn author_of(&self, id: PostId) -> Option<AgentId> {
        self.background.iter().find(|b| b.post.id == id).map(|b| b.author)
    }

    pub fn add_background(&mut self, arrivals: impl IntoIterator<Item = BackgroundPost>, now: SimTime) {
        self.background.extend(arrivals);
        self.background
            .sort_by(|a, b| b.post.score(now).total_cmp(&a.post.score(now)).then(a.post.id.cmp(&b.post.id)));
        self.background.truncate(FEED_SIZE);
    }

    /// Re-ranks the feed from background posts and live honeypot candidates.
    pub fn refresh(&mut self, honeypot_posts: &[FeedCandidate], now: SimTime) {
        let mut all: Vec<FeedCandidate> = self.background.iter().map(|b| b.post).collect();
        all.extend_from_slice(honeypot_posts);
        self.current = rank_top25(&all, now);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(id: u64, likes: u32, comments: u32, day: u32) -> FeedCandidate {
        FeedCandidate::new(PostId(id), likes, comments, SimTime::start_of_day(day))
    }

    #[test]
    fn under_full_feed_returns_everything_sorted() {
        let cands: Vec<_> = (0..10).map(|i| c(i, i as u32, 0, 0)).collect();
        let top = rank_top25(&cands, SimTime::start_of_day(1));
        assert_eq!(top.len(), 10);
        assert_eq!(top[0].id, PostId(9));
        assert_eq!(top[9].id, PostId(0));
    }

    #[test]
    fn ties_go_to_lower_id() {
        let cands = vec![c(7, 5, 0, 2), c(3, 5, 0, 2), c(5, 5, 0, 2)];
        let ids: Vec<u64> = rank_top25(&cands, SimTime::start_of_day(3)).iter().map(|x| x.id.0).collect();
        assert_eq!(ids, vec![3, 5, 7]);
    }

    #[test]
    fn decay_against_hand_computed_scores() {
        let now = SimTime::start_of_day(10);
        let posts = [c(1, 100, 0, 4), c(2, 0, 0, 10), c(3, 10, 5, 9), c(4, 30, 10, 7), c(5, 3, 1, 10)];
        // (likes + 2 comments) * exp(-age/3) for ages 6, 0, 1, 3, 0 days.
        let expected = [100.0 * (-2.0f64).exp(), 0.0, 20.0 * (-1.0f64 / 3.0).exp(), 50.0 * (-1.0f64).exp(), 5.0];
        for (p, e) in posts.iter().zip(expected) {
            assert!((p.score(now) - e).abs() < 1e-12);
        }
        let ids: Vec<u64> = rank_top25(&posts, now).iter().map(|x| x.id.0).collect();
        assert_eq!(ids, vec![4, 3, 1, 5, 2]);
    }

    #[test]
    fn more_than_25_is_truncated() {
        let cands: Vec<_> = (0..40).map(|i| c(i, i as u32, 0, 0)).collect();
        let top = rank_top25(&cands, SimTime::start_of_day(0));
        assert_eq!(top.len(), 25);
        assert_eq!(top.last().unwrap().id, PostId(15));
    }

    #[test]
    fn background_retention_is_order_stable() {
        let mut f = TagFeed::default();
        let bg = |id, likes, day| BackgroundPost { post: c(id, likes, 0, day), author: AgentId(0) };
        f.add_background((0..30).map(|i| bg(i, 10 + i as u32, 0)), SimTime::start_of_day(0));
        assert_eq!(f.background().len(), 25);
        f.add_background([bg(100, 12, 5)], SimTime::start_of_day(5));
        assert_eq!(f.background()[0].post.id, PostId(100));
        f.refresh(&[c(200, 1000, 0, 5)], SimTime::start_of_day(5));
        assert_eq!(f.current()[0].id, PostId(200));
        assert_eq!(f.current().len(), 25);
        assert_eq!(f.author_of(PostId(100)), Some(AgentId(0)));
    }
}
