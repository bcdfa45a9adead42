use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{MappingResult, Window};
use crate::error::{Error, Result};

/// Manually verified (article id, event qid) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldStandard {
    pairs: BTreeSet<(String, String)>,
}

impl GoldStandard {
    pub fn new<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Self {
        GoldStandard {
            pairs: pairs.into_iter().collect(),
        }
    }

    /// Reads `article_id<TAB>qid` lines; `#` starts a comment line.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut pairs = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = raw.split('\t').map(str::trim);
            match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(q), None) if !a.is_empty() && !q.is_empty() => {
                    pairs.insert((a.to_string(), q.to_string()));
                }
                _ => {
                    return Err(Error::Schema(format!(
                        "gold standard line {}: expected article_id<TAB>qid",
                        i + 1
                    )))
                }
            }
        }
        Ok(GoldStandard { pairs })
    }

    pub fn pairs(&self) -> &BTreeSet<(String, String)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn articles(&self) -> BTreeSet<&str> {
        self.pairs.iter().map(|(a, _)| a.as_str()).collect()
    }

    /// Keeps only predictions about articles that appear in the gold standard.
    pub fn restrict<'p>(&self, predictions: &'p [MappingResult]) -> Vec<&'p MappingResult> {
        let universe = self.articles();
        predictions
            .iter()
            .filter(|p| universe.contains(p.article_id.as_str()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Precision, recall and F1 of predicted pairs against the gold pairs.
pub fn evaluate_pairs<'a, I>(predictions: I, gold: &GoldStandard) -> Result<Scores>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    if gold.is_empty() {
        return Err(Error::EmptyGold);
    }
    let predicted: BTreeSet<(&str, &str)> = predictions.into_iter().collect();
    let tp = predicted
        .iter()
        .filter(|(a, q)| gold.pairs.contains(&(a.to_string(), q.to_string())))
        .count();
    let fp = predicted.len() - tp;
    let fn_ = gold.len() - tp;
    let precision = if predicted.is_empty() { 0.0 } else { tp as f64 / predicted.len() as f64 };
    let recall = tp as f64 / gold.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Scores {
        precision,
        recall,
        f1,
        tp,
        fp,
        fn_,
    })
}

/// Scores per sentence window.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub gold_pairs: usize,
    pub windows: BTreeMap<Window, Scores>,
}

impl EvalReport {
    /// Plain-text table with one row per window.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# sentences | Precision | Recall | F1-score\n");
        for (w, s) in &self.windows {
            writeln!(out, "{:<11} | {:>9.2} | {:>6.2} | {:>8.2}", w.as_str(), s.precision, s.recall, s.f1).unwrap();
        }
        out
    }
}

/// Groups predictions by window and scores each group.
pub fn evaluate<'a, I>(predictions: I, gold: &GoldStandard) -> Result<EvalReport>
where
    I: IntoIterator<Item = &'a MappingResult>,
{
    if gold.is_empty() {
        return Err(Error::EmptyGold);
    }
    let mut by_window: BTreeMap<Window, Vec<(&str, &str)>> = BTreeMap::new();
    for p in predictions {
        by_window
            .entry(p.window)
            .or_default()
            .push((p.article_id.as_str(), p.qid.as_str()));
    }
    let mut windows = BTreeMap::new();
    for (w, pairs) in by_window {
        windows.insert(w, evaluate_pairs(pairs, gold)?);
    }
    Ok(EvalReport {
        gold_pairs: gold.len(),
        windows,
    })
}
