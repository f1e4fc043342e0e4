use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::ContentError;
use crate::fixtures::Quote;

/// Appends one uniformly drawn call-to-action after a single space.
///
/// Returns the new caption and the CTA that was used.
pub fn attach_cta<R: Rng + ?Sized>(
    caption: &str,
    cta_pool: &[String],
    rng: &mut R,
) -> Result<(String, String), ContentError> {
    let cta = cta_pool.choose(rng).ok_or(ContentError::EmptyPool("cta"))?;
    Ok((format!("{caption} {cta}"), cta.clone()))
}

pub fn sample_quote<'a, R: Rng + ?Sized>(
    pool: &'a [Quote],
    rng: &mut R,
) -> Result<&'a Quote, ContentError> {
    pool.choose(rng).ok_or(ContentError::EmptyPool("quote"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiText {
    pub text: String,
    /// Word emojis plus one joy emoji per sentence.
    pub emoji_count: u32,
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits text into `(body, terminator)` pairs; a trailing unterminated
/// fragment is a sentence with an empty terminator.
fn sentences(text: &str) -> Vec<(&str, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !is_terminal(c) {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, d)) = chars.peek() {
            if !is_terminal(d) {
                break;
            }
            end = j + d.len_utf8();
            chars.next();
        }
        let body = text[start..i].trim();
        if !body.is_empty() {
            out.push((body, &text[i..end]));
        }
        start = end;
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push((tail, ""));
    }
    out
}

fn lookup<'a>(
    word: &str,
    emoji_map: &'a BTreeMap<String, String>,
    synonyms: &BTreeMap<String, String>,
) -> Option<&'a String> {
    let w = word.to_lowercase();
    emoji_map
        .get(&w)
        .or_else(|| synonyms.get(&w).and_then(|canon| emoji_map.get(canon)))
}

/// Adds a mapped emoji after every word found in `emoji_map` (directly or via
/// `synonyms`) and appends one emoji from `joy_pool` after each sentence.
pub fn insert_emojis<R: Rng + ?Sized>(
    caption: &str,
    emoji_map: &BTreeMap<String, String>,
    synonyms: &BTreeMap<String, String>,
    joy_pool: &[String],
    rng: &mut R,
) -> EmojiText {
    let mut count = 0u32;
    let mut rendered = Vec::new();
    for (body, terminator) in sentences(caption) {
        let mut words = Vec::new();
        for token in body.split_whitespace() {
            let start = token.find(char::is_alphanumeric);
            let end = token.rfind(char::is_alphanumeric);
            let emoji = match (start, end) {
                (Some(s), Some(e)) => {
                    let e = e + token[e..].chars().next().map_or(1, char::len_utf8);
                    lookup(&token[s..e], emoji_map, synonyms).map(|em| (e, em))
                }
                _ => None,
            };
            match emoji {
                Some((e, em)) => {
                    count += 1;
                    words.push(format!("{} {}{}", &token[..e], em, &token[e..]));
                }
                None => words.push(token.to_string()),
            }
        }
        let mut sentence = words.join(" ");
        sentence.push_str(terminator);
        if let Some(joy) = joy_pool.choose(rng) {
            count += 1;
            sentence.push(' ');
            sentence.push_str(joy);
        }
        rendered.push(sentence);
    }
    EmojiText { text: rendered.join(" "), emoji_count: count }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixtures;
    use crate::rng::seeded_rng;

    fn joy() -> Vec<String> {
        vec!["😄".into(), "😊".into()]
    }

    fn count_joy(s: &str, pool: &[String]) -> usize {
        pool.iter().map(|j| s.matches(j.as_str()).count()).sum()
    }

    #[test]
    fn cta_examples() {
        let pool = vec!["What do you think about it?".to_string()];
        let (text, cta) = attach_cta("Sunset pasta.", &pool, &mut seeded_rng(1)).unwrap();
        assert_eq!(text, "Sunset pasta. What do you think about it?");
        assert_eq!(cta, pool[0]);
        let pool = vec!["How was your day?".to_string()];
        assert_eq!(attach_cta("", &pool, &mut seeded_rng(2)).unwrap().0, " How was your day?");
        assert_eq!(attach_cta("x", &[], &mut seeded_rng(3)), Err(ContentError::EmptyPool("cta")));
    }

    #[test]
    fn cta_draw_is_uniform_over_fixture() {
        let pool = &Fixtures::builtin().cta;
        let mut rng = seeded_rng(5);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..500 {
            seen.insert(attach_cta("a", pool, &mut rng).unwrap().1);
        }
        assert_eq!(seen.len(), pool.len());
    }

    #[test]
    fn empty_caption_stays_empty() {
        let e = insert_emojis("", &BTreeMap::new(), &BTreeMap::new(), &joy(), &mut seeded_rng(1));
        assert_eq!(e, EmojiText { text: String::new(), emoji_count: 0 });
    }

    #[test]
    fn two_sentences_two_joy_emojis() {
        let map = BTreeMap::from([("cat".to_string(), "🐱".to_string())]);
        let e = insert_emojis(
            "I love my cat. She is sweet.",
            &map,
            &BTreeMap::new(),
            &joy(),
            &mut seeded_rng(4),
        );
        assert!(e.text.contains("cat 🐱."));
        assert_eq!(count_joy(&e.text, &joy()), 2);
        assert_eq!(e.emoji_count, 3);
    }

    #[test]
    fn unmapped_single_sentence_gets_one_joy_emoji() {
        let e = insert_emojis("Hello there", &BTreeMap::new(), &BTreeMap::new(), &joy(), &mut seeded_rng(9));
        assert_eq!(count_joy(&e.text, &joy()), 1);
        assert!(e.text.starts_with("Hello there "));
    }

    #[test]
    fn fixture_map_and_synonyms() {
        // Independent expectation: words of the sentence present in the fixture
        // table (after synonym folding) are love, cat, sweet, kitty->cat.
        let f = Fixtures::builtin();
        let e = insert_emojis(
            "I love my cat. She is sweet! Kitty naps",
            &f.emoji_map,
            &f.synonyms,
            &f.joy_emojis,
            &mut seeded_rng(99),
        );
        let word_emojis = [&f.emoji_map["love"], &f.emoji_map["cat"], &f.emoji_map["sweet"]];
        for em in word_emojis {
            assert!(e.text.contains(em.as_str()), "{} missing in {}", em, e.text);
        }
        assert!(e.text.contains(&format!("Kitty {}", f.emoji_map["cat"])));
        assert_eq!(count_joy(&e.text, &f.joy_emojis), 3);
        assert_eq!(e.emoji_count, 4 + 3);
    }

    #[test]
    fn punctuation_runs_close_one_sentence() {
        let s = sentences("Wow!!! Really?! ok");
        assert_eq!(s, vec![("Wow", "!!!"), ("Really", "?!"), ("ok", "")]);
    }

    #[test]
    fn quote_sampling() {
        let one = vec![Quote { text: "q".into(), author: "a".into() }];
        assert_eq!(sample_quote(&one, &mut seeded_rng(1)).unwrap(), &one[0]);
        assert_eq!(sample_quote(&[], &mut seeded_rng(1)), Err(ContentError::EmptyPool("quote")));
    }
}
