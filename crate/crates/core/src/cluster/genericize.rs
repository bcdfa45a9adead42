use std::collections::HashMap;
use std::ops::Range;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{phrase_tokens, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntityKind {
    Gpe,
    Org,
    Person,
    Norp,
    Date,
}

impl EntityKind {
    /// Generic phrase substituted for a mention of this kind.
    pub fn generic(self) -> &'static str {
        match self {
            EntityKind::Gpe => "geopolitical entity",
            EntityKind::Org => "organization",
            EntityKind::Person => "person",
            EntityKind::Norp => "nationality",
            EntityKind::Date => "date",
        }
    }

    pub fn generic_tokens(self) -> impl Iterator<Item = &'static str> {
        self.generic().split(' ')
    }
}

/// A recognized mention, as a token range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityMatch {
    pub kind: EntityKind,
    pub tokens: Range<usize>,
}

const MONTHS: &str = "january|february|march|april|may|june|july|august|september|october|november|december\
                      |jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec";

fn month_day() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(&format!(r"^(?:{MONTHS})-\d{{1,2}}$")).unwrap())
}

fn month() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(&format!(r"^(?:{MONTHS})$")).unwrap())
}

fn year() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(?:1[5-9]|20)\d{2}$").unwrap())
}

fn day() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\d{1,2}(?:st|nd|rd|th)?$").unwrap())
}

/// Gazetteer lookup plus date patterns over normalized tokens.
#[derive(Debug, Clone, Default)]
pub struct Recognizer {
    entries: HashMap<Vec<String>, EntityKind>,
    longest: usize,
}

impl Recognizer {
    /// Recognizer over the gazetteers shipped with the crate.
    pub fn shipped() -> &'static Recognizer {
        static SHIPPED: OnceLock<Recognizer> = OnceLock::new();
        SHIPPED.get_or_init(|| {
            let mut r = Recognizer::default();
            r.add_list(EntityKind::Gpe, include_str!("../../data/gazetteer/gpe.txt"));
            r.add_list(EntityKind::Org, include_str!("../../data/gazetteer/org.txt"));
            r.add_list(EntityKind::Person, include_str!("../../data/gazetteer/person.txt"));
            r.add_list(EntityKind::Norp, include_str!("../../data/gazetteer/norp.txt"));
            r
        })
    }

    /// Adds one entry per non-comment line. Earlier entries win on conflict.
    pub fn add_list(&mut self, kind: EntityKind, list: &str) {
        for line in list.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            self.add(kind, line);
        }
    }

    pub fn add(&mut self, kind: EntityKind, name: &str) {
        let key = phrase_tokens(name);
        if key.is_empty() {
            return;
        }
        self.longest = self.longest.max(key.len());
        self.entries.entry(key).or_insert(kind);
    }

    fn date_at(&self, tokens: &[&str], i: usize) -> Option<usize> {
        let t = tokens[i];
        if month_day().is_match(t) || year().is_match(t) {
            return Some(1);
        }
        let next = tokens.get(i + 1).copied();
        if month().is_match(t) {
            let mut len = 1;
            if next.is_some_and(|n| day().is_match(n)) {
                len += 1;
                if tokens.get(i + 2).is_some_and(|n| year().is_match(n)) {
                    len += 1;
                }
            } else if next.is_some_and(|n| year().is_match(n)) {
                len += 1;
            } else if t == "may" || t == "mar" {
                return None;
            }
            return Some(len);
        }
        if day().is_match(t) && next.is_some_and(|n| month().is_match(n)) {
            let len = if tokens.get(i + 2).is_some_and(|n| year().is_match(n)) { 3 } else { 2 };
            return Some(len);
        }
        None
    }

    /// Longest-match, left-to-right recognition over normalized tokens.
    pub fn recognize(&self, tokens: &[&str]) -> Vec<EntityMatch> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let gazetteer = (1..=self.longest.min(tokens.len() - i)).rev().find_map(|len| {
                let key: Vec<String> = tokens[i..i + len].iter().map(|t| t.to_string()).collect();
                self.entries.get(&key).map(|&kind| (kind, len))
            });
            let found = gazetteer.or_else(|| self.date_at(tokens, i).map(|len| (EntityKind::Date, len)));
            match found {
                Some((kind, len)) => {
                    out.push(EntityMatch { kind, tokens: i..i + len });
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }

    /// Recognition over article tokens; matches never cross sentences.
    pub fn recognize_tokens(&self, tokens: &[Token]) -> Vec<EntityMatch> {
        let mut out = Vec::new();
        let mut start = 0;
        while start < tokens.len() {
            let sentence = tokens[start].sentence;
            let end = start + tokens[start..].iter().take_while(|t| t.sentence == sentence).count();
            let words: Vec<&str> = tokens[start..end].iter().map(|t| t.normalized.as_str()).collect();
            out.extend(self.recognize(&words).into_iter().map(|m| EntityMatch {
                kind: m.kind,
                tokens: m.tokens.start + start..m.tokens.end + start,
            }));
            start = end;
        }
        out
    }
}

/// Label tokens with every recognized mention replaced by its generic phrase.
pub fn genericize_label(label: &str, recognizer: &Recognizer) -> Vec<String> {
    segments(label, recognizer)
        .into_iter()
        .flat_map(|seg| match seg {
            Segment::Plain(words) => words,
            Segment::Entity(kind) => kind.generic_tokens().map(str::to_string).collect(),
        })
        .collect()
}

pub(crate) enum Segment {
    Plain(Vec<String>),
    Entity(EntityKind),
}

/// Splits a label into runs of plain tokens and recognized mentions.
pub(crate) fn segments(label: &str, recognizer: &Recognizer) -> Vec<Segment> {
    let tokens = phrase_tokens(label);
    let words: Vec<&str> = tokens.iter().map(String::as_str).collect();
    let mut out = Vec::new();
    let mut at = 0;
    for m in recognizer.recognize(&words) {
        if m.tokens.start > at {
            out.push(Segment::Plain(tokens[at..m.tokens.start].to_vec()));
        }
        out.push(Segment::Entity(m.kind));
        at = m.tokens.end;
    }
    if at < tokens.len() {
        out.push(Segment::Plain(tokens[at..].to_vec()));
    }
    out
}
