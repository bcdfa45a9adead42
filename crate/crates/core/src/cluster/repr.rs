use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embedding::EmbeddingTable;
use super::genericize::{genericize_label, Recognizer};
use crate::error::{Error, Result};
use crate::kb::Wet;
use crate::stats::{tfidf_imt_vocab, tfidf_wet, ImtVocabStats, WetStats};

/// Sparse vector keyed by token or IMT code; zero weights are never stored.
pub type SparseVec = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WetRepresentation {
    pub qid: String,
    pub label: String,
    pub label_vec: Vec<f64>,
    pub content_vec: SparseVec,
    pub imt_vec: SparseVec,
}

/// Mean embedding of the genericized label tokens.
pub fn label_repr(wet: &Wet, table: &EmbeddingTable, recognizer: &Recognizer) -> Result<Vec<f64>> {
    let tokens = genericize_label(&wet.label, recognizer);
    table
        .mean(tokens.iter().map(String::as_str))
        .ok_or_else(|| Error::AllOutOfVocabulary(wet.qid.clone()))
}

pub fn content_repr(wet: &str, stats: &WetStats) -> Result<SparseVec> {
    let counts = stats.tf.get(wet).ok_or_else(|| Error::UnmappedWet(wet.to_string()))?;
    Ok(counts
        .keys()
        .map(|token| (token.clone(), tfidf_wet(token, wet, stats)))
        .filter(|(_, w)| *w != 0.0)
        .collect())
}

pub fn imt_repr(wet: &str, stats: &ImtVocabStats) -> Result<SparseVec> {
    let counts = stats.tf.get(wet).ok_or_else(|| Error::UnmappedWet(wet.to_string()))?;
    Ok(counts
        .keys()
        .map(|imt| (imt.clone(), tfidf_imt_vocab(imt, wet, stats)))
        .filter(|(_, w)| *w != 0.0)
        .collect())
}

/// A WET left out of clustering and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedWet {
    pub qid: String,
    pub label: String,
    pub reason: String,
}

pub fn wet_representation(
    wet: &Wet,
    table: &EmbeddingTable,
    recognizer: &Recognizer,
    wet_stats: &WetStats,
    imt_stats: &ImtVocabStats,
) -> Result<WetRepresentation> {
    Ok(WetRepresentation {
        qid: wet.qid.clone(),
        label: wet.label.clone(),
        content_vec: content_repr(&wet.qid, wet_stats)?,
        imt_vec: imt_repr(&wet.qid, imt_stats)?,
        label_vec: label_repr(wet, table, recognizer)?,
    })
}

/// Representations for every WET that can be represented, sorted by qid,
/// plus the ones that could not.
pub fn build_representations(
    wets: &[Wet],
    table: &EmbeddingTable,
    recognizer: &Recognizer,
    wet_stats: &WetStats,
    imt_stats: &ImtVocabStats,
) -> (Vec<WetRepresentation>, Vec<ExcludedWet>) {
    let mut unique: BTreeMap<&str, &Wet> = BTreeMap::new();
    for w in wets {
        unique.entry(w.qid.as_str()).or_insert(w);
    }
    let results: Vec<_> = unique
        .par_iter()
        .map(|(_, wet)| (wet, wet_representation(wet, table, recognizer, wet_stats, imt_stats)))
        .collect();
    let mut reprs = Vec::new();
    let mut excluded = Vec::new();
    for (wet, r) in results {
        match r {
            Ok(r) => reprs.push(r),
            Err(e) => excluded.push(ExcludedWet {
                qid: wet.qid.clone(),
                label: wet.label.clone(),
                reason: e.to_string(),
            }),
        }
    }
    (reprs, excluded)
}
