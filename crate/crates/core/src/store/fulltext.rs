use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{phrase_tokens, ArticleText};
use crate::kb::is_stopword;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    /// Index into the document list.
    pub doc: u32,
    /// Token positions within the document.
    pub positions: Vec<u32>,
}

/// Inverted index over normalized article tokens.
#[derive(Debug, Clone, Default)]
pub struct FullTextIndex {
    docs: Vec<String>,
    postings: BTreeMap<String, Vec<Posting>>,
}

impl FullTextIndex {
    /// Indexes documents in id order, so postings are sorted by article id.
    pub fn build<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a ArticleText)>,
    {
        let mut sorted: Vec<(&str, &ArticleText)> = docs.into_iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(b.0));
        sorted.dedup_by(|a, b| a.0 == b.0);
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        for (doc, (_, text)) in sorted.iter().enumerate() {
            let mut positions: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
            for (i, t) in text.tokens.iter().enumerate() {
                positions.entry(t.normalized.as_str()).or_default().push(i as u32);
            }
            for (token, positions) in positions {
                postings.entry(token.to_string()).or_default().push(Posting {
                    doc: doc as u32,
                    positions,
                });
            }
        }
        FullTextIndex {
            docs: sorted.into_iter().map(|(id, _)| id.to_string()).collect(),
            postings,
        }
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn doc_id(&self, doc: u32) -> &str {
        &self.docs[doc as usize]
    }

    pub fn postings(&self, token: &str) -> &[Posting] {
        self.postings.get(token).map_or(&[], Vec::as_slice)
    }

    pub fn idf(&self, token: &str) -> f64 {
        let df = self.postings(token).len();
        if df == 0 {
            return 0.0;
        }
        (self.docs.len() as f64 / df as f64).ln()
    }

    /// Weight of `token` in `doc`: occurrences times idf.
    pub fn weight(&self, token: &str, doc_id: &str) -> f64 {
        let Ok(doc) = self.docs.binary_search_by(|d| d.as_str().cmp(doc_id)) else {
            return 0.0;
        };
        let list = self.postings(token);
        match list.binary_search_by(|p| p.doc.cmp(&(doc as u32))) {
            Ok(i) => list[i].positions.len() as f64 * self.idf(token),
            Err(_) => 0.0,
        }
    }

    /// Documents containing every query term, with the sum of term weights.
    /// Sorted by article id.
    pub fn search(&self, terms: &[String]) -> Vec<(String, f64)> {
        if terms.is_empty() {
            return Vec::new();
        }
        let mut lists: Vec<(&str, &[Posting])> = terms.iter().map(|t| (t.as_str(), self.postings(t))).collect();
        lists.sort_by_key(|(_, l)| l.len());
        let mut hits: BTreeMap<u32, f64> = lists[0].1.iter().map(|p| (p.doc, 0.0)).collect();
        for (_, list) in &lists {
            let docs: BTreeSet<u32> = list.iter().map(|p| p.doc).collect();
            hits.retain(|d, _| docs.contains(d));
        }
        for (token, list) in &lists {
            let idf = self.idf(token);
            for p in list.iter() {
                if let Some(score) = hits.get_mut(&p.doc) {
                    *score += p.positions.len() as f64 * idf;
                }
            }
        }
        hits.into_iter().map(|(d, s)| (self.doc_id(d).to_string(), s)).collect()
    }
}

/// Query terms: distinct normalized tokens, stopwords dropped unless the query
/// has nothing else.
pub fn query_terms(query: &str) -> Vec<String> {
    let all = phrase_tokens(query);
    let mut seen = BTreeSet::new();
    let content: Vec<String> = all.iter().filter(|t| !is_stopword(t)).cloned().collect();
    let chosen = if content.is_empty() { all } else { content };
    chosen.into_iter().filter(|t| seen.insert(t.clone())).collect()
}
