use std::collections::HashSet;

use super::EmbeddingModel;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::eval::{rank_scores, SimilarityProvider};

/// Cosine similarity of two non-zero vectors.
pub fn cosine(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "vector lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Domain("cosine of a zero vector".into()));
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

#[inline]
pub(crate) fn dot_f32(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let tail: f32 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f32>() + tail
}

/// Read-only, unit-normalized view of a dense model for similarity queries.
#[derive(Clone, Debug)]
pub struct DenseIndex {
    vocab: Vocabulary,
    dims: usize,
    unit: Vec<f32>,
}

impl DenseIndex {
    pub fn from_model(model: &EmbeddingModel) -> Self {
        let dims = model.dims();
        let mut unit = Vec::with_capacity(model.len() * dims);
        for r in 0..model.len() {
            let row = model.input.row(r);
            let norm = row.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt();
            if norm > 0.0 {
                unit.extend(row.iter().map(|&x| (x as f64 / norm) as f32));
            } else {
                unit.extend(std::iter::repeat(0.0).take(dims));
            }
        }
        DenseIndex {
            vocab: model.vocab.clone(),
            dims,
            unit,
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn unit_row(&self, idx: usize) -> &[f32] {
        &self.unit[idx * self.dims..(idx + 1) * self.dims]
    }

    fn lookup_all(&self, terms: &[&str]) -> Result<Vec<usize>> {
        terms
            .iter()
            .map(|t| self.vocab.index(t).ok_or_else(|| Error::Lookup(t.to_string())))
            .collect()
    }

    /// Terms ranked by cosine against `Σ unit(positives) − Σ unit(negatives)`.
    /// Excluded terms are never returned; ties go to the earlier vocabulary
    /// entry.
    pub fn most_similar(
        &self,
        positives: &[&str],
        negatives: &[&str],
        topn: usize,
        exclude: &[&str],
    ) -> Result<Vec<(String, f64)>> {
        let pos = self.lookup_all(positives)?;
        let neg = self.lookup_all(negatives)?;
        let exclude: Vec<usize> = exclude.iter().filter_map(|t| self.vocab.index(t)).collect();
        Ok(self
            .rank(&pos, &neg, topn, &exclude)
            .into_iter()
            .map(|(i, s)| (self.vocab.term(i).to_string(), s))
            .collect())
    }
}

impl SimilarityProvider for DenseIndex {
    fn len(&self) -> usize {
        self.vocab.len()
    }

    fn term(&self, idx: usize) -> &str {
        self.vocab.term(idx)
    }

    fn lookup(&self, term: &str) -> Option<usize> {
        self.vocab.index(term)
    }

    fn rank(
        &self,
        positives: &[usize],
        negatives: &[usize],
        topn: usize,
        exclude: &[usize],
    ) -> Vec<(usize, f64)> {
        if topn == 0 {
            return Vec::new();
        }
        let mut query = vec![0.0f64; self.dims];
        for (&i, sign) in positives
            .iter()
            .map(|i| (i, 1.0))
            .chain(negatives.iter().map(|i| (i, -1.0)))
        {
            for (q, &x) in query.iter_mut().zip(self.unit_row(i)) {
                *q += sign * x as f64;
            }
        }
        let qnorm = query.iter().map(|x| x * x).sum::<f64>().sqrt();
        let query: Vec<f32> = if qnorm > 0.0 {
            query.iter().map(|&x| (x / qnorm) as f32).collect()
        } else {
            vec![0.0; self.dims]
        };
        let excluded: HashSet<usize> = exclude.iter().copied().collect();
        let scores = (0..self.vocab.len())
            .filter(|i| !excluded.contains(i))
            .map(|i| (i, dot_f32(self.unit_row(i), &query) as f64));
        rank_scores(scores, topn)
    }

    fn similarity(&self, a: usize, b: usize) -> f64 {
        dot_f32(self.unit_row(a), self.unit_row(b)) as f64
    }

    fn centroid_similarities(&self, members: &[usize]) -> Vec<f64> {
        let mut mean = vec![0.0f64; self.dims];
        for &m in members {
            for (acc, &x) in mean.iter_mut().zip(self.unit_row(m)) {
                *acc += x as f64;
            }
        }
        let k = members.len() as f64;
        mean.iter_mut().for_each(|x| *x /= k);
        let mean_norm = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
        members
            .iter()
            .map(|&m| {
                let row = self.unit_row(m);
                let row_norm = row.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
                if mean_norm == 0.0 || row_norm == 0.0 {
                    return 0.0;
                }
                let dot: f64 = row.iter().zip(&mean).map(|(&x, &y)| x as f64 * y).sum();
                dot / (row_norm * mean_norm)
            })
            .collect()
    }
}
