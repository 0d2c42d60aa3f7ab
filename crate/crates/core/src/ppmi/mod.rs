//! Count-based baseline: sparse word-context co-occurrence counts weighted
//! by positive pointwise mutual information, compared by sparse cosine.

mod io;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::corpus::{build_vocab, Corpus, Vocabulary};
use crate::error::{Error, Result};
use crate::eval::{rank_scores, SimilarityProvider};

pub use io::{load_ppmi, save_ppmi, write_ppmi};

pub const DEFAULT_PPMI_WINDOW: usize = 5;

const SHARD_SENTENCES: usize = 2048;

/// Sparse `#(w, c)` counts with their marginals. Rows are words, columns
/// are contexts, both indexed by the same vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct CooccurrenceMatrix {
    vocab: Vocabulary,
    window: usize,
    /// Per word, `(context, count)` sorted by context.
    rows: Vec<Vec<(u32, u64)>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl CooccurrenceMatrix {
    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn get(&self, w: usize, c: usize) -> u64 {
        let row = &self.rows[w];
        row.binary_search_by_key(&(c as u32), |&(k, _)| k)
            .map_or(0, |p| row[p].1)
    }

    pub fn row(&self, w: usize) -> &[(u32, u64)] {
        &self.rows[w]
    }

    pub fn row_sum(&self, w: usize) -> u64 {
        self.row_sums[w]
    }

    pub fn col_sum(&self, c: usize) -> u64 {
        self.col_sums[c]
    }

    /// `|D|`, the number of counted word-context pairs.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

fn count_shard(sentences: &[Vec<String>], vocab: &Vocabulary, window: usize) -> HashMap<(u32, u32), u64> {
    let mut counts = HashMap::new();
    let mut ids: Vec<Option<u32>> = Vec::new();
    for sentence in sentences {
        ids.clear();
        ids.extend(sentence.iter().map(|t| vocab.index(t).map(|i| i as u32)));
        for (i, &w) in ids.iter().enumerate() {
            let Some(w) = w else { continue };
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(ids.len() - 1);
            for (j, &c) in ids.iter().enumerate().take(hi + 1).skip(lo) {
                if let (true, Some(c)) = (j != i, c) {
                    *counts.entry((w, c)).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Symmetric-window counts inside sentences. Out-of-vocabulary tokens are
/// never counted but still occupy their positions.
pub fn count_cooccurrences(corpus: &Corpus, vocab: &Vocabulary, window: usize) -> Result<CooccurrenceMatrix> {
    if window == 0 {
        return Err(Error::Config("PPMI window must be at least 1".into()));
    }
    let merged = corpus
        .sentences()
        .par_chunks(SHARD_SENTENCES)
        .map(|shard| count_shard(shard, vocab, window))
        .reduce(HashMap::new, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            for (k, v) in small {
                *big.entry(k).or_insert(0) += v;
            }
            big
        });
    let n = vocab.len();
    let mut rows: Vec<Vec<(u32, u64)>> = vec![Vec::new(); n];
    let mut row_sums = vec![0u64; n];
    let mut col_sums = vec![0u64; n];
    let mut total = 0u64;
    for ((w, c), v) in merged {
        rows[w as usize].push((c, v));
        row_sums[w as usize] += v;
        col_sums[c as usize] += v;
        total += v;
    }
    rows.iter_mut().for_each(|r| r.sort_unstable_by_key(|&(c, _)| c));
    Ok(CooccurrenceMatrix {
        vocab: vocab.clone(),
        window,
        rows,
        row_sums,
        col_sums,
        total,
    })
}

/// Sparse PPMI weights in compressed-row form with a transposed copy for
/// fast query scoring. Only strictly positive weights are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePpmiModel {
    vocab: Vocabulary,
    window: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    norms: Vec<f64>,
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_values: Vec<f64>,
}

/// `max(0, log(#(w,c)·|D| / (#(w)·#(c))))` per cell.
pub fn to_ppmi(counts: &CooccurrenceMatrix) -> SparsePpmiModel {
    let d = counts.total as f64;
    let mut triplets = Vec::new();
    for (w, row) in counts.rows.iter().enumerate() {
        for &(c, n) in row {
            let pmi = ((n as f64 * d) / (counts.row_sums[w] as f64 * counts.col_sums[c as usize] as f64)).ln();
            if pmi > 0.0 {
                triplets.push((w as u32, c, pmi));
            }
        }
    }
    SparsePpmiModel::from_triplets(counts.vocab.clone(), counts.window, triplets)
        .expect("indices come from the same vocabulary")
}

/// Vocabulary, counts and PPMI weights in one call.
pub fn train_ppmi(corpus: &Corpus, min_count: u64, window: usize) -> Result<SparsePpmiModel> {
    let vocab = build_vocab(corpus, min_count)?;
    if vocab.is_empty() {
        return Err(Error::Config(format!("no term occurs at least {min_count} times")));
    }
    Ok(to_ppmi(&count_cooccurrences(corpus, &vocab, window)?))
}

impl SparsePpmiModel {
    /// Builds the model from `(word, context, weight)` cells. Weights must be
    /// finite and positive, cells unique.
    pub fn from_triplets(vocab: Vocabulary, window: usize, mut cells: Vec<(u32, u32, f64)>) -> Result<Self> {
        let n = vocab.len();
        for &(w, c, v) in &cells {
            if w as usize >= n || c as usize >= n {
                return Err(Error::Domain(format!("cell ({w}, {c}) outside a {n}-term vocabulary")));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("cell ({w}, {c}) has non-positive weight {v}")));
            }
        }
        cells.sort_unstable_by_key(|&(w, c, _)| (w, c));
        if cells.windows(2).any(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(Error::Domain("duplicate PPMI cell".into()));
        }
        let mut indptr = vec![0usize; n + 1];
        let mut col_ptr = vec![0usize; n + 1];
        for &(w, c, _) in &cells {
            indptr[w as usize + 1] += 1;
            col_ptr[c as usize + 1] += 1;
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
            col_ptr[i + 1] += col_ptr[i];
        }
        let indices: Vec<u32> = cells.iter().map(|&(_, c, _)| c).collect();
        let values: Vec<f64> = cells.iter().map(|&(_, _, v)| v).collect();
        let mut fill = col_ptr.clone();
        let mut col_rows = vec![0u32; cells.len()];
        let mut col_values = vec![0.0f64; cells.len()];
        for &(w, c, v) in &cells {
            let slot = &mut fill[c as usize];
            col_rows[*slot] = w;
            col_values[*slot] = v;
            *slot += 1;
        }
        let norms = (0..n)
            .map(|w| values[indptr[w]..indptr[w + 1]].iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
        Ok(SparsePpmiModel {
            vocab,
            window,
            indptr,
            indices,
            values,
            norms,
            col_ptr,
            col_rows,
            col_values,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(context, weight)` pairs of a row, sorted by context.
    pub fn row(&self, w: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[w]..self.indptr[w + 1];
        self.indices[span.clone()].iter().map(|&c| c as usize).zip(self.values[span].iter().copied())
    }

    pub fn get(&self, w: usize, c: usize) -> f64 {
        let span = self.indptr[w]..self.indptr[w + 1];
        self.indices[span.clone()]
            .binary_search(&(c as u32))
            .map_or(0.0, |p| self.values[span.start + p])
    }

    /// All stored cells in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.vocab.len()).flat_map(move |w| self.row(w).map(move |(c, v)| (w, c, v)))
    }

    fn lookup_all(&self, terms: &[&str]) -> Result<Vec<usize>> {
        terms
            .iter()
            .map(|t| self.vocab.index(t).ok_or_else(|| Error::Lookup(t.to_string())))
            .collect()
    }

    /// Same contract as the dense `most_similar`, with sparse-row cosine.
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

    /// Sum of the unit rows of `members`, signed, as a sparse map.
    fn combine(&self, terms: impl Iterator<Item = (usize, f64)>) -> HashMap<usize, f64> {
        let mut q = HashMap::new();
        for (w, sign) in terms {
            if self.norms[w] == 0.0 {
                continue;
            }
            for (c, v) in self.row(w) {
                *q.entry(c).or_insert(0.0) += sign * v / self.norms[w];
            }
        }
        q
    }
}

impl SimilarityProvider for SparsePpmiModel {
    fn len(&self) -> usize {
        self.vocab.len()
    }

    fn term(&self, idx: usize) -> &str {
        self.vocab.term(idx)
    }

    fn lookup(&self, term: &str) -> Option<usize> {
        self.vocab.index(term)
    }

    fn rank(&self, positives: &[usize], negatives: &[usize], topn: usize, exclude: &[usize]) -> Vec<(usize, f64)> {
        if topn == 0 {
            return Vec::new();
        }
        let query = self.combine(
            positives.iter().map(|&p| (p, 1.0)).chain(negatives.iter().map(|&n| (n, -1.0))),
        );
        let qnorm = query.values().map(|v| v * v).sum::<f64>().sqrt();
        let mut scores = vec![0.0f64; self.vocab.len()];
        if qnorm > 0.0 {
            for (&c, &qv) in &query {
                for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                    scores[self.col_rows[k] as usize] += self.col_values[k] * qv;
                }
            }
            for (w, s) in scores.iter_mut().enumerate() {
                *s = if self.norms[w] > 0.0 { *s / (self.norms[w] * qnorm) } else { 0.0 };
            }
        }
        let mut excluded = vec![false; self.vocab.len()];
        exclude.iter().for_each(|&e| excluded[e] = true);
        rank_scores(
            scores.into_iter().enumerate().filter(|(i, _)| !excluded[*i]),
            topn,
        )
    }

    fn similarity(&self, a: usize, b: usize) -> f64 {
        if self.norms[a] == 0.0 || self.norms[b] == 0.0 {
            return 0.0;
        }
        let (mut i, mut j) = (self.indptr[a], self.indptr[b]);
        let mut dot = 0.0;
        while i < self.indptr[a + 1] && j < self.indptr[b + 1] {
            match self.indices[i].cmp(&self.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += self.values[i] * self.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        dot / (self.norms[a] * self.norms[b])
    }

    fn centroid_similarities(&self, members: &[usize]) -> Vec<f64> {
        let k = members.len() as f64;
        let mean: HashMap<usize, f64> = self
            .combine(members.iter().map(|&m| (m, 1.0)))
            .into_iter()
            .map(|(c, v)| (c, v / k))
            .collect();
        let mean_norm = mean.values().map(|v| v * v).sum::<f64>().sqrt();
        members
            .iter()
            .map(|&m| {
                if mean_norm == 0.0 || self.norms[m] == 0.0 {
                    return 0.0;
                }
                let dot: f64 = self.row(m).map(|(c, v)| v * mean.get(&c).copied().unwrap_or(0.0)).sum();
                dot / (self.norms[m] * mean_norm)
            })
            .collect()
    }
}
