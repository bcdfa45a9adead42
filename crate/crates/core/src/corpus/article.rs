use std::collections::{BTreeSet, HashSet};

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use super::sentences::{split_sentences, ArticleText};
use crate::error::{Error, Result};

/// One newswire story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewsArticle {
    pub id: String,
    pub headline: String,
    /// Document creation time.
    pub created: DateTime<Utc>,
    pub dateline: Option<String>,
    pub iptc_codes: BTreeSet<String>,
    pub slugs: Vec<String>,
    pub paragraphs: Vec<String>,
}

impl NewsArticle {
    /// Calendar date of the creation time, in UTC.
    pub fn created_date(&self) -> NaiveDate {
        self.created.date_naive()
    }

    pub(crate) fn validate(mut self) -> Result<Self> {
        self.id = self.id.trim().to_string();
        if self.id.is_empty() {
            return Err(Error::Schema("empty article id".into()));
        }
        if self.headline.trim().is_empty() {
            return Err(Error::Schema(format!("article {}: empty headline", self.id)));
        }
        self.iptc_codes = self
            .iptc_codes
            .into_iter()
            .map(|c| c.trim().to_string())
            .filter(|c| !c.is_empty())
            .collect();
        if self.iptc_codes.is_empty() {
            return Err(Error::Schema(format!("article {}: no IPTC code", self.id)));
        }
        self.paragraphs.retain(|p| !p.trim().is_empty());
        Ok(self)
    }
}

/// Parses an ISO-8601 timestamp (extended or basic format) into UTC.
pub fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y%m%dT%H%M%S%#z", "%Y%m%dT%H%M%S%z", "%Y-%m-%dT%H:%M:%S%#z"] {
        if let Ok(dt) = DateTime::parse_from_str(raw, fmt) {
            return Some(dt.with_timezone(&Utc));
        }
    }
    let bare = raw.trim_end_matches('Z');
    for fmt in ["%Y%m%dT%H%M%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(bare, fmt) {
            return Some(dt.and_utc());
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc())
}

/// An immutable, id-sorted collection of articles with their analyzed text.
#[derive(Debug, Clone)]
pub struct Corpus {
    articles: Vec<NewsArticle>,
    texts: Vec<ArticleText>,
}

impl Corpus {
    /// Builds a corpus; ids must be unique. Articles are ordered by id.
    pub fn new(mut articles: Vec<NewsArticle>) -> Result<Self> {
        let mut seen = HashSet::new();
        for a in &articles {
            if !seen.insert(a.id.as_str()) {
                return Err(Error::DuplicateArticle(a.id.clone()));
            }
        }
        articles.sort_by(|a, b| a.id.cmp(&b.id));
        let texts = articles.iter().map(split_sentences).collect();
        Ok(Corpus { articles, texts })
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn articles(&self) -> &[NewsArticle] {
        &self.articles
    }

    pub fn texts(&self) -> &[ArticleText] {
        &self.texts
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NewsArticle, &ArticleText)> {
        self.articles.iter().zip(&self.texts)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.articles.binary_search_by(|a| a.id.as_str().cmp(id)).ok()
    }

    pub fn get(&self, id: &str) -> Option<(&NewsArticle, &ArticleText)> {
        self.position(id).map(|i| (&self.articles[i], &self.texts[i]))
    }

    pub fn into_articles(self) -> Vec<NewsArticle> {
        self.articles
    }
}
