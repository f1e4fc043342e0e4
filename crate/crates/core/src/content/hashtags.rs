use rand::seq::IndexedRandom;
use rand::Rng;

use super::ContentError;
use crate::domain::Hashtag;

pub const CAPTION_HASHTAGS: usize = 15;
pub const TOP_PICKS: usize = 8;
pub const BOTTOM_PICKS: usize = 7;

/// Draws 8 broad-coverage and 7 niche tags from a ranked pool.
///
/// The pool splits at `ceil(n/2)`. The top half is weighted `half - i` for
/// 0-based position `i` (rank 1 heaviest), the bottom half `i + 1` (last rank
/// heaviest). Both draws are without replacement; top picks come first.
pub fn select_hashtags<R: Rng + ?Sized>(
    pool: &[Hashtag],
    rng: &mut R,
) -> Result<Vec<String>, ContentError> {
    if pool.len() < CAPTION_HASHTAGS {
        return Err(ContentError::InsufficientPool(pool.len()));
    }
    let split = pool.len().div_ceil(2);
    let top: Vec<(usize, &Hashtag)> = pool[..split].iter().enumerate().collect();
    let bottom: Vec<(usize, &Hashtag)> = pool[split..].iter().enumerate().collect();

    let mut out = Vec::with_capacity(CAPTION_HASHTAGS);
    let top_picks = top
        .choose_multiple_weighted(rng, TOP_PICKS, |(i, _)| (split - i) as f64)
        .expect("positive finite weights");
    out.extend(top_picks.map(|(_, h)| h.tag.clone()));
    let bottom_picks = bottom
        .choose_multiple_weighted(rng, BOTTOM_PICKS, |(i, _)| (i + 1) as f64)
        .expect("positive finite weights");
    out.extend(bottom_picks.map(|(_, h)| h.tag.clone()));
    Ok(out)
}
