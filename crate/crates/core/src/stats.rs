//! Term statistics behind subject scoring and event-type representations.
//!
//! Three families are kept:
//! - [`ImtStats`]: token counts per media topic, for article/event subject scores;
//! - [`WetStats`]: token counts per event-type document (all articles mapped to
//!   events of that type, concatenated);
//! - [`ImtVocabStats`]: media-topic counts per event type.
//!
//! Every weight has the form `tf * ln(total / df)` with raw counts and the
//! natural logarithm; unseen keys weigh 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::kb::EventCollection;
use crate::mapping::MappingResult;

fn tfidf(tf: u32, total: usize, df: u32) -> f64 {
    if tf == 0 || df == 0 {
        return 0.0;
    }
    tf as f64 * (total as f64 / df as f64).ln()
}

/// Token statistics over media topics (IMTs).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ImtStats {
    /// Number of distinct IMT codes observed in the corpus.
    pub n_imts: usize,
    /// token -> number of IMTs whose articles contain the token
    pub df: BTreeMap<String, u32>,
    /// token -> IMT -> occurrences across all articles carrying the IMT
    pub tf: BTreeMap<String, BTreeMap<String, u32>>,
}

impl ImtStats {
    pub fn tf(&self, token: &str, imt: &str) -> u32 {
        self.tf.get(token).and_then(|m| m.get(imt)).copied().unwrap_or(0)
    }

    pub fn df(&self, token: &str) -> u32 {
        self.df.get(token).copied().unwrap_or(0)
    }
}

/// Builds [`ImtStats`]; each article's tokens count once per IMT it carries.
pub fn build_imt_stats(corpus: &Corpus) -> Result<ImtStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    type Partial = HashMap<(String, String), u32>;
    let counts: Partial = corpus
        .articles()
        .par_iter()
        .zip(corpus.texts().par_iter())
        .fold(Partial::new, |mut acc, (article, text)| {
            let mut local: HashMap<&str, u32> = HashMap::new();
            for t in text.tokens.iter() {
                *local.entry(t.normalized.as_str()).or_default() += 1;
            }
            for (token, n) in local {
                for imt in &article.iptc_codes {
                    *acc.entry((token.to_string(), imt.clone())).or_default() += n;
                }
            }
            acc
        })
        .reduce(Partial::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    let mut tf: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
    for ((token, imt), n) in counts {
        tf.entry(token).or_default().insert(imt, n);
    }
    let df = tf.iter().map(|(t, per)| (t.clone(), per.len() as u32)).collect();
    let imts: BTreeSet<&String> = corpus.articles().iter().flat_map(|a| &a.iptc_codes).collect();
    Ok(ImtStats {
        n_imts: imts.len(),
        df,
        tf,
    })
}

/// IMT-based weight of `token` for an article carrying `imts`.
///
/// The largest per-IMT term frequency among the article's IMTs is used.
pub fn tfidf_imt<'a, I>(token: &str, imts: I, stats: &ImtStats) -> f64
where
    I: IntoIterator<Item = &'a String>,
{
    let Some(per_imt) = stats.tf.get(token) else {
        return 0.0;
    };
    let tf = imts.into_iter().filter_map(|imt| per_imt.get(imt)).copied().max().unwrap_or(0);
    tfidf(tf, stats.n_imts, stats.df(token))
}

/// Event type -> article ids mapped to events of that type.
pub(crate) fn articles_per_wet<'a>(
    events: &EventCollection,
    mappings: &'a [MappingResult],
) -> BTreeMap<String, BTreeSet<&'a str>> {
    let mut out: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for m in mappings {
        if let Some(ev) = events.get(&m.qid) {
            for wet in ev.wet_qids() {
                out.entry(wet.to_string()).or_default().insert(m.article_id.as_str());
            }
        }
    }
    out
}

/// Token statistics over event-type documents.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WetStats {
    /// Number of event types with at least one mapped article.
    pub m: usize,
    /// token -> number of event-type documents containing it
    pub df: BTreeMap<String, u32>,
    /// event type -> token -> count in its document
    pub tf: BTreeMap<String, BTreeMap<String, u32>>,
}

impl WetStats {
    pub fn tf(&self, token: &str, wet: &str) -> u32 {
        self.tf.get(wet).and_then(|m| m.get(token)).copied().unwrap_or(0)
    }

    pub fn df(&self, token: &str) -> u32 {
        self.df.get(token).copied().unwrap_or(0)
    }

    pub fn contains_wet(&self, wet: &str) -> bool {
        self.tf.contains_key(wet)
    }

    pub fn wets(&self) -> impl Iterator<Item = &str> {
        self.tf.keys().map(String::as_str)
    }
}

pub fn build_wet_stats(corpus: &Corpus, events: &EventCollection, mappings: &[MappingResult]) -> WetStats {
    let per_wet = articles_per_wet(events, mappings);
    let tf: BTreeMap<String, BTreeMap<String, u32>> = per_wet
        .par_iter()
        .map(|(wet, ids)| {
            let mut counts: BTreeMap<String, u32> = BTreeMap::new();
            for (_, text) in ids.iter().filter_map(|id| corpus.get(id)) {
                for t in text.tokens.iter() {
                    *counts.entry(t.normalized.clone()).or_default() += 1;
                }
            }
            (wet.clone(), counts)
        })
        .filter(|(_, counts)| !counts.is_empty())
        .collect();
    let mut df: BTreeMap<String, u32> = BTreeMap::new();
    for counts in tf.values() {
        for token in counts.keys() {
            *df.entry(token.clone()).or_default() += 1;
        }
    }
    WetStats { m: tf.len(), df, tf }
}

pub fn tfidf_wet(token: &str, wet: &str, stats: &WetStats) -> f64 {
    tfidf(stats.tf(token, wet), stats.m, stats.df(token))
}

/// Media-topic vocabulary statistics per event type.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ImtVocabStats {
    pub m: usize,
    /// event type -> IMT -> number of mapped articles labeled with the IMT
    pub tf: BTreeMap<String, BTreeMap<String, u32>>,
    /// IMT -> number of event types with at least one such article
    pub df: BTreeMap<String, u32>,
    /// event type -> number of mapped articles
    pub articles: BTreeMap<String, u32>,
}

impl ImtVocabStats {
    pub fn tf(&self, wet: &str, imt: &str) -> u32 {
        self.tf.get(wet).and_then(|m| m.get(imt)).copied().unwrap_or(0)
    }

    pub fn df(&self, imt: &str) -> u32 {
        self.df.get(imt).copied().unwrap_or(0)
    }
}

pub fn build_imt_vocab_stats(corpus: &Corpus, events: &EventCollection, mappings: &[MappingResult]) -> ImtVocabStats {
    let per_wet = articles_per_wet(events, mappings);
    let mut tf: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
    let mut articles = BTreeMap::new();
    for (wet, ids) in &per_wet {
        let found: Vec<_> = ids.iter().filter_map(|id| corpus.get(id)).collect();
        if found.is_empty() {
            continue;
        }
        let counts = tf.entry(wet.clone()).or_default();
        for (article, _) in &found {
            for imt in &article.iptc_codes {
                *counts.entry(imt.clone()).or_default() += 1;
            }
        }
        articles.insert(wet.clone(), found.len() as u32);
    }
    let mut df: BTreeMap<String, u32> = BTreeMap::new();
    for counts in tf.values() {
        for imt in counts.keys() {
            *df.entry(imt.clone()).or_default() += 1;
        }
    }
    ImtVocabStats {
        m: tf.len(),
        tf,
        df,
        articles,
    }
}

pub fn tfidf_imt_vocab(imt: &str, wet: &str, stats: &ImtVocabStats) -> f64 {
    tfidf(stats.tf(wet, imt), stats.m, stats.df(imt))
}
