use super::ContentError;

fn starts_with_vowel(word: &str) -> bool {
    word.chars().next().is_some_and(|c| "aeiouAEIOU".contains(c))
}

/// Rewrites the article `a` to `an` before vowel-initial words.
pub fn normalize_articles(sentence: &str) -> String {
    let words: Vec<&str> = sentence.split(' ').collect();
    let mut out = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let next_vowel = words.get(i + 1).is_some_and(|n| starts_with_vowel(n));
        match *w {
            "a" if next_vowel => out.push("an"),
            "A" if next_vowel => out.push("An"),
            _ => out.push(w),
        }
    }
    out.join(" ")
}

/// Fills `a {style} {medium} of a {keyword}` after checking both pools.
pub fn art_prompt(
    topic_keyword: &str,
    style: &str,
    medium: &str,
    styles: &[String],
    media: &[String],
) -> Result<String, ContentError> {
    if !styles.iter().any(|s| s == style) {
        return Err(ContentError::UnknownStyle(style.to_string()));
    }
    if !media.iter().any(|m| m == medium) {
        return Err(ContentError::UnknownMedium(medium.to_string()));
    }
    Ok(normalize_articles(&format!("a {style} {medium} of a {topic_keyword}")))
}
