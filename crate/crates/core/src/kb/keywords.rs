use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::event::KbEvent;
use crate::corpus::phrase_tokens;

/// The shipped English stopword list.
pub fn stopwords() -> &'static HashSet<&'static str> {
    static STOPWORDS: OnceLock<HashSet<&'static str>> = OnceLock::new();
    STOPWORDS.get_or_init(|| {
        include_str!("../../data/stopwords.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

pub fn is_stopword(token: &str) -> bool {
    stopwords().contains(token)
}

/// Subject keywords of an event: normalized tokens of its label and type labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventKeywordSet {
    pub qid: String,
    pub keywords: BTreeSet<String>,
}

impl EventKeywordSet {
    pub fn contains(&self, token: &str) -> bool {
        self.keywords.contains(token)
    }
}

pub fn event_keywords(event: &KbEvent) -> EventKeywordSet {
    let keywords = std::iter::once(event.label.as_str())
        .chain(event.wets.iter().map(|w| w.label.as_str()))
        .flat_map(phrase_tokens)
        .filter(|t| !t.is_empty() && !is_stopword(t))
        .collect();
    EventKeywordSet {
        qid: event.qid.clone(),
        keywords,
    }
}
