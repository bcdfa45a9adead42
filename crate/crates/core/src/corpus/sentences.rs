//! Sentence segmentation over an article's canonical text.
//!
//! The headline is always sentence 0. Body paragraphs are split at terminal
//! punctuation (`.`, `!`, `?`, optionally followed by closing quotes or
//! brackets) when the next non-space character is an uppercase letter or a
//! digit, unless the word carrying the period is a known abbreviation or a
//! single-letter initial. Paragraph ends always close a sentence.

use std::collections::HashSet;
use std::ops::Range;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::article::NewsArticle;
use super::tokenize::{tokenize_at, Token, TokenStream};

/// Separator placed between the headline and paragraphs in the canonical text.
pub const BLOCK_SEPARATOR: &str = "\n\n";

fn abbreviations() -> &'static HashSet<&'static str> {
    static ABBREVIATIONS: OnceLock<HashSet<&'static str>> = OnceLock::new();
    ABBREVIATIONS.get_or_init(|| {
        include_str!("../../data/abbreviations.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// Analyzed text of one article: canonical text, sentence ranges and tokens.
///
/// All spans are byte offsets into `text`, which is the headline followed by
/// the paragraphs, each block separated by a blank line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleText {
    pub text: String,
    pub sentences: Vec<Range<usize>>,
    pub tokens: TokenStream,
}

impl ArticleText {
    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn sentence_text(&self, index: usize) -> Option<&str> {
        self.sentences.get(index).map(|r| &self.text[r.clone()])
    }

    /// Tokens of the first `limit` sentences (all of them for `None`).
    pub fn window(&self, limit: Option<usize>) -> &[Token] {
        let tokens = &self.tokens.tokens;
        match limit {
            None => tokens,
            Some(k) => {
                let end = tokens.partition_point(|t| t.sentence < k);
                &tokens[..end]
            }
        }
    }

    /// Number of sentences visible through a first-`k` window.
    pub fn window_sentences(&self, limit: Option<usize>) -> usize {
        match limit {
            None => self.sentences.len(),
            Some(k) => self.sentences.len().min(k),
        }
    }
}

/// Splits an article into sentences and tokenizes each of them.
pub fn split_sentences(article: &NewsArticle) -> ArticleText {
    let mut text = String::with_capacity(
        article.headline.len() + article.paragraphs.iter().map(|p| p.len() + 2).sum::<usize>(),
    );
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();

    text.push_str(&article.headline);
    let headline = trim_range(&text, 0..text.len());
    tokens.extend(tokenize_at(&text[headline.clone()], headline.start, 0));
    sentences.push(headline);

    for paragraph in &article.paragraphs {
        text.push_str(BLOCK_SEPARATOR);
        let base = text.len();
        text.push_str(paragraph);
        for local in sentence_ranges(paragraph) {
            let range = local.start + base..local.end + base;
            let index = sentences.len();
            tokens.extend(tokenize_at(&text[range.clone()], range.start, index));
            sentences.push(range);
        }
    }

    ArticleText {
        text,
        sentences,
        tokens: TokenStream { tokens },
    }
}

fn trim_range(text: &str, range: Range<usize>) -> Range<usize> {
    let slice = &text[range.clone()];
    let lead = slice.len() - slice.trim_start().len();
    let trail = slice.len() - slice.trim_end().len();
    range.start + lead..range.end - trail
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}' | '\u{bb}')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '\u{201c}' | '\u{2018}' | '\u{ab}')
}

/// Sentence ranges (byte offsets, trimmed) of a single paragraph.
pub fn sentence_ranges(paragraph: &str) -> Vec<Range<usize>> {
    let chars: Vec<(usize, char)> = paragraph.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let (pos, c) = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        // swallow runs like "?!" or ".\"" before checking what follows
        let mut j = i + 1;
        while j < chars.len() && (matches!(chars[j].1, '.' | '!' | '?') || is_closer(chars[j].1)) {
            j += 1;
        }
        let end_byte = chars.get(j).map_or(paragraph.len(), |&(p, _)| p);
        let mut k = j;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        if k == j || k == chars.len() {
            i = j;
            continue;
        }
        let mut next = chars[k].1;
        if is_opener(next) && k + 1 < chars.len() {
            next = chars[k + 1].1;
        }
        let starts_sentence = next.is_uppercase() || next.is_ascii_digit();
        if starts_sentence && !(c == '.' && is_abbreviation(&paragraph[start..pos])) {
            let range = trim_range(paragraph, start..end_byte);
            if !range.is_empty() {
                out.push(range);
            }
            start = chars[k].0;
        }
        i = j;
    }
    let range = trim_range(paragraph, start..paragraph.len());
    if !range.is_empty() {
        out.push(range);
    }
    out
}

/// Whether the word ending right before a period is an abbreviation or initial.
fn is_abbreviation(before_period: &str) -> bool {
    let word = before_period
        .rsplit(|c: char| c.is_whitespace())
        .next()
        .unwrap_or("")
        .trim_start_matches(is_opener);
    if word.is_empty() {
        return false;
    }
    let mut chars = word.chars();
    let first = chars.next().unwrap();
    if chars.next().is_none() && first.is_alphabetic() && first.is_uppercase() {
        return true;
    }
    abbreviations().contains(word.to_lowercase().as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn article(headline: &str, paragraphs: &[&str]) -> NewsArticle {
        NewsArticle {
            id: "a".into(),
            headline: headline.into(),
            created: Utc.with_ymd_and_hms(2015, 3, 24, 12, 0, 0).unwrap(),
            dateline: None,
            iptc_codes: ["03010000".to_string()].into_iter().collect(),
            slugs: vec![],
            paragraphs: paragraphs.iter().map(|p| p.to_string()).collect(),
        }
    }

    fn texts(p: &str) -> Vec<&str> {
        sentence_ranges(p).into_iter().map(|r| &p[r]).collect()
    }

    #[test]
    fn headline_is_sentence_zero() {
        let at = split_sentences(&article("Big crash", &["It fell. Nobody survived."]));
        assert_eq!(at.sentence_count(), 3);
        assert_eq!(at.sentence_text(0), Some("Big crash"));
        assert_eq!(at.sentence_text(1), Some("It fell."));
        assert_eq!(at.sentence_text(2), Some("Nobody survived."));
        let idx: Vec<usize> = at.tokens.iter().map(|t| t.sentence).collect();
        assert_eq!(idx, [0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn abbreviation_stoplist() {
        assert_eq!(texts("Mr. Smith died. He was 90."), ["Mr. Smith died.", "He was 90."]);
        assert_eq!(texts("The U.S. Army said J. Doe left."), ["The U.S. Army said J. Doe left."]);
    }

    #[test]
    fn boundary_requires_capital_or_digit() {
        assert_eq!(texts("It cost 3.5 m. euros. 150 died."), ["It cost 3.5 m. euros.", "150 died."]);
        assert_eq!(texts("\"We are shocked.\" The minister spoke!"), ["\"We are shocked.\"", "The minister spoke!"]);
        assert_eq!(texts("Really?! Yes."), ["Really?!", "Yes."]);
    }

    #[test]
    fn empty_body() {
        let at = split_sentences(&article("Only a title", &[]));
        assert_eq!(at.sentence_count(), 1);
        assert_eq!(at.window(Some(5)).len(), 3);
    }

    #[test]
    fn spans_are_in_canonical_text() {
        let at = split_sentences(&article("Headline here", &["First one. Second, 1,500 dead.", "New para."]));
        for t in at.tokens.iter() {
            assert_eq!(&at.text[t.span.clone()], t.surface);
            assert!(at.sentences[t.sentence].start <= t.span.start);
            assert!(t.span.end <= at.sentences[t.sentence].end);
        }
        assert_eq!(at.sentence_count(), 4);
        assert_eq!(at.window(Some(2)).iter().map(|t| t.normalized.as_str()).collect::<Vec<_>>(), ["headline", "here", "first", "one"]);
    }
}
