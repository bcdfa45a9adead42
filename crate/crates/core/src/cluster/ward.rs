use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::repr::WetRepresentation;
use super::similarity::{pair_similarity, Weights};
use crate::error::{Error, Result};

/// One agglomeration step. Leaves are numbered `0..n`; the cluster created by
/// merge `i` gets id `n + i`. `a` is the side holding the smaller leaf key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub new_id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Merge list as `idA idB distance newId` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.merges {
            out.push_str(&format!("{} {} {} {}\n", m.a, m.b, m.distance, m.new_id));
        }
        out
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.distance).collect()
    }

    /// Leaf indices of every node, leaves first then merged clusters.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let n = self.leaves.len();
        let mut nodes: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for m in &self.merges {
            let mut joined = nodes[m.a].clone();
            joined.extend_from_slice(&nodes[m.b]);
            joined.sort_unstable();
            nodes.push(joined);
        }
        nodes
    }
}

/// Ward agglomeration over a symmetric distance matrix using the
/// Lance–Williams update on the distances as given.
///
/// Among equally distant candidate pairs the one whose smaller, then larger,
/// cluster key (smallest member key) is lexicographically least is merged.
pub fn ward_linkage(dist: &[Vec<f64>], keys: &[String]) -> Result<Dendrogram> {
    let n = dist.len();
    if n < 2 {
        return Err(Error::TooFewWets(n));
    }
    if keys.len() != n || dist.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(n, keys.len()));
    }
    let mut d: Vec<Vec<f64>> = dist.to_vec();
    let mut active: Vec<bool> = vec![true; n];
    let mut size: Vec<usize> = vec![1; n];
    let mut key: Vec<&str> = keys.iter().map(String::as_str).collect();
    let mut node: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best: Option<(f64, &str, &str, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            for j in (i + 1..n).filter(|&j| active[j]) {
                let (lo, hi) = if key[i] <= key[j] { (i, j) } else { (j, i) };
                let cand = (d[i][j], key[lo], key[hi], lo, hi);
                let better = match &best {
                    None => true,
                    Some(b) => cand
                        .0
                        .total_cmp(&b.0)
                        .then_with(|| cand.1.cmp(b.1))
                        .then_with(|| cand.2.cmp(b.2))
                        .is_lt(),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (height, _, _, i, j) = best.expect("at least two active clusters");
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for k in (0..n).filter(|&k| active[k] && k != i && k != j) {
            let nk = size[k] as f64;
            let updated = ((ni + nk) * d[i][k] + (nj + nk) * d[j][k] - nk * height) / (ni + nj + nk);
            d[i][k] = updated;
            d[k][i] = updated;
        }
        merges.push(Merge {
            a: node[i],
            b: node[j],
            distance: height,
            new_id: n + step,
            size: size[i] + size[j],
        });
        active[j] = false;
        size[i] += size[j];
        key[i] = key[i].min(key[j]);
        node[i] = n + step;
    }
    Ok(Dendrogram {
        leaves: keys.to_vec(),
        merges,
    })
}

/// Pairwise `1 - similarity` matrix, computed in parallel.
pub fn distance_matrix(reprs: &[WetRepresentation], weights: Weights) -> Result<Vec<Vec<f64>>> {
    reprs
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            reprs
                .iter()
                .enumerate()
                .map(|(j, b)| if i == j { Ok(0.0) } else { pair_similarity(a, b, weights).map(|s| 1.0 - s) })
                .collect()
        })
        .collect()
}

/// Clusters WET representations; input order does not matter.
pub fn ward_cluster(reprs: &[WetRepresentation], weights: Weights) -> Result<Dendrogram> {
    weights.validate()?;
    let mut sorted: Vec<&WetRepresentation> = reprs.iter().collect();
    sorted.sort_by(|a, b| a.qid.cmp(&b.qid));
    sorted.dedup_by(|a, b| a.qid == b.qid);
    let owned: Vec<WetRepresentation> = sorted.into_iter().cloned().collect();
    let dist = distance_matrix(&owned, weights)?;
    let keys: Vec<String> = owned.iter().map(|r| r.qid.clone()).collect();
    ward_linkage(&dist, &keys)
}
