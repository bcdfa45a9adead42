use std::collections::HashMap;

use crate::error::{Error, Result};

/// Pretrained word vectors: one `word v1 .. vd` line per word.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Parses the text format. The dimension comes from the first vector
    /// line; a leading `count dim` header line is skipped. Words are lowercased
    /// and the first occurrence of a word wins.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = 0usize;
        let mut vectors = HashMap::new();
        let mut first = true;
        for (i, line) in text.lines().enumerate() {
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let values: Vec<&str> = fields.collect();
            if first {
                first = false;
                if values.len() == 1 && word.parse::<usize>().is_ok() && values[0].parse::<usize>().is_ok() {
                    continue;
                }
            }
            let vector = values
                .iter()
                .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::Embedding(format!("line {}: non-numeric component", i + 1)))?;
            if vector.is_empty() {
                return Err(Error::Embedding(format!("line {}: word without vector", i + 1)));
            }
            if dim == 0 {
                dim = vector.len();
            } else if vector.len() != dim {
                return Err(Error::Embedding(format!(
                    "line {}: expected {dim} components, found {}",
                    i + 1,
                    vector.len()
                )));
            }
            vectors.entry(word.to_lowercase()).or_insert(vector);
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, Vec<f64>)>>(pairs: I) -> Result<Self> {
        let mut table = EmbeddingTable::default();
        for (word, v) in pairs {
            if table.dim == 0 {
                table.dim = v.len();
            } else if v.len() != table.dim {
                return Err(Error::DimensionMismatch(table.dim, v.len()));
            }
            table.vectors.insert(word.to_lowercase(), v);
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Vector of `word`; `None` when out of vocabulary.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Mean vector of the in-vocabulary words; `None` if none is known.
    pub fn mean<'a, I>(&self, words: I) -> Option<Vec<f64>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for v in words.into_iter().filter_map(|w| self.get(w)) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            n += 1;
        }
        (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
    }
}

/// Cosine similarity of dense vectors; 0 when either has zero norm.
pub fn cosine_dense(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}
