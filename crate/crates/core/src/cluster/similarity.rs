use serde::{Deserialize, Serialize};

use super::embedding::cosine_dense;
use super::repr::{SparseVec, WetRepresentation};
use crate::error::{Error, Result};

/// Mixing weights for the label, content and IMT similarities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            alpha: 0.38,
            beta: 0.57,
            gamma: 0.05,
        }
    }
}

impl Weights {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.alpha, self.beta, self.gamma];
        if parts.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("similarity weights must be finite and non-negative".into()));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("similarity weights must sum to 1, got {sum}")));
        }
        Ok(())
    }
}

/// Cosine of two sparse vectors; 0 if either is empty.
pub fn cosine_sparse(a: &SparseVec, b: &SparseVec) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.iter().filter_map(|(k, x)| large.get(k).map(|y| x * y)).sum();
    let na: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

pub fn pair_similarity(a: &WetRepresentation, b: &WetRepresentation, w: Weights) -> Result<f64> {
    let label = cosine_dense(&a.label_vec, &b.label_vec)?;
    let content = cosine_sparse(&a.content_vec, &b.content_vec);
    let imt = cosine_sparse(&a.imt_vec, &b.imt_vec);
    Ok(w.alpha * label + w.beta * content + w.gamma * imt)
}
