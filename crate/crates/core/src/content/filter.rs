use std::collections::BTreeSet;

use super::{ContentError, Detection};

/// The strongest detection must reach this score or the image is discarded.
pub const MIN_TOP_SCORE: f64 = 0.25;
/// Other detections must exceed this score to become keywords.
pub const MIN_KEEP_SCORE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeepDecision {
    Keep(Vec<String>),
    Discard,
}

/// Turns object detections into keywords, or discards the image.
///
/// Input is re-sorted by descending score (stable), so callers may pass any order.
pub fn keyword_filter(detections: &[Detection]) -> Result<KeepDecision, ContentError> {
    let mut sorted: Vec<&Detection> = detections.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));
    let top = sorted.first().ok_or(ContentError::EmptyDetections)?;
    if top.score < MIN_TOP_SCORE {
        return Ok(KeepDecision::Discard);
    }
    let mut kept = vec![top.label.clone()];
    kept.extend(sorted[1..].iter().filter(|d| d.score > MIN_KEEP_SCORE).map(|d| d.label.clone()));
    Ok(KeepDecision::Keep(kept))
}

const ENGLISH_STOPWORD_RATIO: f64 = 0.2;

/// Stopword-ratio heuristic: at least a fifth of the alphabetic words are
/// English stopwords.
pub fn is_english(text: &str, stopwords: &BTreeSet<String>) -> bool {
    let words: Vec<String> = text
        .split(|c: char| !c.is_alphabetic() && c != '\'')
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect();
    if words.is_empty() {
        return false;
    }
    let hits = words.iter().filter(|w| stopwords.contains(w.as_str())).count();
    hits as f64 / words.len() as f64 >= ENGLISH_STOPWORD_RATIO
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixtures;
    use proptest::prelude::*;

    fn d(l: &str, s: f64) -> Detection {
        Detection::new(l, s)
    }

    fn keep(labels: &[&str]) -> KeepDecision {
        KeepDecision::Keep(labels.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn examples() {
        let r = keyword_filter(&[d("cat", 0.60), d("bowl", 0.10), d("grass", 0.04)]).unwrap();
        assert_eq!(r, keep(&["cat", "bowl"]));
        assert_eq!(keyword_filter(&[d("dog", 0.20), d("grass", 0.10)]).unwrap(), KeepDecision::Discard);
        assert_eq!(keyword_filter(&[d("cat", 0.25)]).unwrap(), keep(&["cat"]));
        assert_eq!(keyword_filter(&[]), Err(ContentError::EmptyDetections));
    }

    #[test]
    fn boundaries() {
        assert_eq!(keyword_filter(&[d("x", 0.24)]).unwrap(), KeepDecision::Discard);
        assert_eq!(keyword_filter(&[d("x", 0.9), d("y", 0.05)]).unwrap(), keep(&["x"]));
        assert_eq!(keyword_filter(&[d("x", 0.9), d("y", 0.0500001)]).unwrap(), keep(&["x", "y"]));
    }

    #[test]
    fn english_heuristic() {
        let sw = &Fixtures::builtin().stopwords;
        assert!(is_english("I love the way this pasta looks on the table", sw));
        assert!(!is_english("Che bella giornata al mare con gli amici", sw));
        assert!(!is_english("", sw));
    }

    proptest! {
        #[test]
        fn low_scores_never_change_kept_set(
            scores in prop::collection::vec(0.0f64..1.0, 1..10),
            extra in 0.0f64..=0.05,
        ) {
            let base: Vec<Detection> =
                scores.iter().enumerate().map(|(i, &s)| d(&format!("l{i}"), s)).collect();
            let mut more = base.clone();
            more.push(d("extra", extra));
            let a = keyword_filter(&base).unwrap();
            let b = keyword_filter(&more).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
