//! Word tokenizer shared by every stage.
//!
//! Rules:
//! - segmentation follows Unicode word boundaries (UAX #29); segments without
//!   any alphanumeric character (punctuation, whitespace) are dropped;
//! - adjacent word segments joined by a single `-` form one token, so
//!   `mid-air` and `jan-7` stay whole;
//! - the normalized form is the lowercased surface with surrounding
//!   punctuation stripped and a trailing possessive `'s` removed;
//! - numbers are kept, and digit grouping commas are dropped from the
//!   normalized form (`1,500` becomes `1500`).
//!
//! Spans are byte offsets into the text that was tokenized.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub sentence: usize,
    pub span: Range<usize>,
}

impl Token {
    /// Parsed numeric value when the normalized form is an integer or decimal.
    pub fn number(&self) -> Option<f64> {
        parse_number(&self.normalized)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.tokens.iter()
    }

    pub fn normalized(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.normalized.as_str()).collect()
    }
}

impl<'a> IntoIterator for &'a TokenStream {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.tokens.iter()
    }
}

/// Tokenizes `text`; every token gets sentence index 0.
pub fn tokenize(text: &str) -> TokenStream {
    TokenStream {
        tokens: tokenize_at(text, 0, 0),
    }
}

/// Tokenizes `text`, shifting spans by `offset` and tagging tokens with `sentence`.
pub(crate) fn tokenize_at(text: &str, offset: usize, sentence: usize) -> Vec<Token> {
    let mut spans: Vec<Range<usize>> = Vec::new();
    // set when the last pushed span ended with a hyphen joint still open
    let mut pending_hyphen: Option<usize> = None;

    for (start, seg) in text.split_word_bound_indices() {
        let end = start + seg.len();
        if seg == "-" {
            match spans.last() {
                Some(last) if last.end == start && pending_hyphen.is_none() => {
                    pending_hyphen = Some(end);
                }
                _ => pending_hyphen = None,
            }
            continue;
        }
        if !seg.chars().any(char::is_alphanumeric) {
            pending_hyphen = None;
            continue;
        }
        match pending_hyphen.take() {
            Some(hyphen_end) if hyphen_end == start => {
                spans.last_mut().expect("hyphen follows a token").end = end;
            }
            _ => spans.push(start..end),
        }
    }

    spans
        .into_iter()
        .filter_map(|span| {
            let surface = &text[span.clone()];
            let normalized = normalize(surface);
            if normalized.is_empty() {
                return None;
            }
            Some(Token {
                surface: surface.to_string(),
                normalized,
                sentence,
                span: span.start + offset..span.end + offset,
            })
        })
        .collect()
}

/// Normalized form of a single surface token.
pub fn normalize(surface: &str) -> String {
    let lowered = surface.to_lowercase();
    let mut trimmed = lowered.trim_matches(|c: char| !c.is_alphanumeric());
    for suffix in ["'s", "\u{2019}s"] {
        if let Some(stem) = trimmed.strip_suffix(suffix) {
            if !stem.is_empty() {
                trimmed = stem.trim_end_matches(|c: char| !c.is_alphanumeric());
            }
        }
    }
    if is_grouped_number(trimmed) {
        trimmed.replace(',', "")
    } else {
        trimmed.to_string()
    }
}

/// `1,500` / `12,345,678.9`
fn is_grouped_number(s: &str) -> bool {
    let (int_part, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    if let Some(f) = frac {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
    }
    let groups: Vec<&str> = int_part.split(',').collect();
    if groups.len() < 2 {
        return false;
    }
    let first = groups[0];
    !first.is_empty()
        && first.len() <= 3
        && first.bytes().all(|b| b.is_ascii_digit())
        && groups[1..]
            .iter()
            .all(|g| g.len() == 3 && g.bytes().all(|b| b.is_ascii_digit()))
}

/// Parses a normalized integer or decimal token.
pub fn parse_number(normalized: &str) -> Option<f64> {
    let (int_part, frac) = match normalized.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (normalized, None),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if let Some(f) = frac {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
    }
    normalized.parse().ok()
}

/// Normalized tokens of a short phrase (labels, aliases, query strings).
pub fn phrase_tokens(text: &str) -> Vec<String> {
    tokenize_at(text, 0, 0)
        .into_iter()
        .map(|t| t.normalized)
        .collect()
}

/// Index of the first token where `phrase` occurs as a contiguous run of
/// normalized tokens. An empty phrase never matches.
pub fn find_phrase(tokens: &[Token], phrase: &[String]) -> Option<usize> {
    if phrase.is_empty() || phrase.len() > tokens.len() {
        return None;
    }
    (0..=tokens.len() - phrase.len()).find(|&i| {
        tokens[i..i + phrase.len()]
            .iter()
            .zip(phrase)
            .all(|(t, p)| t.normalized == *p)
    })
}
