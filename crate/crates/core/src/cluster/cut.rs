use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::filters::SchemaFilter;
use super::genericize::{segments, Recognizer, Segment};
use super::ward::Dendrogram;
use crate::kb::is_stopword;

pub const DEFAULT_THRESHOLD: f64 = 0.23;
/// Spread of second differences at or below which the curve has no knee.
pub const FLAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutMode {
    #[default]
    Elbow,
    Fixed,
}

impl fmt::Display for CutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutMode::Elbow => "elbow",
            CutMode::Fixed => "fixed",
        })
    }
}

impl FromStr for CutMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "elbow" => Ok(CutMode::Elbow),
            "fixed" => Ok(CutMode::Fixed),
            other => Err(format!("unknown cut mode {other:?} (expected elbow or fixed)")),
        }
    }
}

/// A flat partition of the dendrogram leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub mode: CutMode,
    pub threshold: f64,
    /// False when the elbow search fell back to the default threshold.
    pub knee_found: bool,
    /// Leaf indices per cluster, each sorted.
    pub groups: Vec<Vec<usize>>,
}

/// Knee of the merge-height curve.
///
/// The within-cluster total after `i` merges is the running sum of merge
/// heights, so its second difference at step `i` is `h[i+1] - h[i]`. The cut
/// goes midway across the largest such jump. `None` when there are fewer than
/// two jumps or all jumps are equal within [`FLAT_TOLERANCE`].
pub fn elbow_threshold(heights: &[f64]) -> Option<f64> {
    if heights.len() < 3 {
        return None;
    }
    let jumps: Vec<f64> = heights.windows(2).map(|w| w[1] - w[0]).collect();
    let max = jumps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = jumps.iter().copied().fold(f64::INFINITY, f64::min);
    if max - min <= FLAT_TOLERANCE {
        return None;
    }
    let knee = jumps.iter().position(|&j| j == max)?;
    Some((heights[knee] + heights[knee + 1]) / 2.0)
}

/// Clusters obtained by applying every merge at or below `threshold`.
pub fn flat_clusters(dendrogram: &Dendrogram, threshold: f64) -> Vec<Vec<usize>> {
    let n = dendrogram.leaves.len();
    let mut parent: Vec<usize> = (0..n + dendrogram.merges.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in dendrogram.merges.iter().filter(|m| m.distance <= threshold) {
        let (ra, rb) = (find(&mut parent, m.a), find(&mut parent, m.b));
        parent[ra] = m.new_id;
        parent[rb] = m.new_id;
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        groups.entry(root).or_default().push(leaf);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
    groups.sort();
    groups
}

pub fn elbow_cut(dendrogram: &Dendrogram, fallback: f64) -> Cut {
    let (threshold, knee_found) = match elbow_threshold(&dendrogram.heights()) {
        Some(t) => (t, true),
        None => (fallback, false),
    };
    Cut {
        mode: CutMode::Elbow,
        threshold,
        knee_found,
        groups: flat_clusters(dendrogram, threshold),
    }
}

pub fn fixed_cut(dendrogram: &Dendrogram, threshold: f64) -> Cut {
    Cut {
        mode: CutMode::Fixed,
        threshold,
        knee_found: false,
        groups: flat_clusters(dendrogram, threshold),
    }
}

/// A coarse event schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaCluster {
    pub schema_id: String,
    pub label: String,
    pub wets: Vec<String>,
    pub filters: Vec<SchemaFilter>,
}

/// Most frequent run of plain (non-entity) label tokens across the given
/// labels, counted once per label. Runs neither start nor end on a stopword.
/// Ties prefer longer runs, then lexicographic order.
pub fn display_label<'a, I>(labels: I, recognizer: &Recognizer) -> String
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: HashMap<Vec<String>, usize> = HashMap::new();
    for label in labels {
        let mut seen = std::collections::HashSet::new();
        for seg in segments(label, recognizer) {
            let Segment::Plain(words) = seg else { continue };
            for i in 0..words.len() {
                for j in i + 1..=words.len() {
                    let run = &words[i..j];
                    if is_stopword(&run[0]) || is_stopword(&run[run.len() - 1]) {
                        continue;
                    }
                    if seen.insert(run.to_vec()) {
                        *counts.entry(run.to_vec()).or_default() += 1;
                    }
                }
            }
        }
    }
    counts
        .into_iter()
        .max_by(|(ra, ca), (rb, cb)| ca.cmp(cb).then(ra.len().cmp(&rb.len())).then(rb.cmp(ra)))
        .map(|(run, _)| run.join(" "))
        .unwrap_or_default()
}

/// Orders the groups by decreasing size (ties by smallest member key) and
/// names them `S1..Sk`.
pub fn name_schemas(dendrogram: &Dendrogram, cut: &Cut, labels: &BTreeMap<String, String>, recognizer: &Recognizer) -> Vec<SchemaCluster> {
    let mut groups: Vec<Vec<&String>> = cut
        .groups
        .iter()
        .map(|g| {
            let mut qids: Vec<&String> = g.iter().map(|&i| &dendrogram.leaves[i]).collect();
            qids.sort();
            qids
        })
        .collect();
    groups.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(b[0])));
    groups
        .into_iter()
        .enumerate()
        .map(|(i, qids)| {
            let label = display_label(qids.iter().filter_map(|q| labels.get(*q).map(String::as_str)), recognizer);
            SchemaCluster {
                schema_id: format!("S{}", i + 1),
                label,
                wets: qids.into_iter().cloned().collect(),
                filters: Vec::new(),
            }
        })
        .collect()
}
