use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::error::{Error, Result};

/// Term-to-index mapping with corpus counts.
///
/// Vocabularies built from a corpus are ordered by descending count with ties
/// broken lexicographically. Vocabularies imported from vector files keep the
/// file's order and carry zero counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabRepr", into = "VocabRepr")]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, usize>,
    total_tokens: u64,
    min_count: u64,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    entries: Vec<(String, u64)>,
    min_count: u64,
}

impl From<VocabRepr> for Vocabulary {
    fn from(r: VocabRepr) -> Self {
        Vocabulary::from_entries(r.entries, r.min_count)
    }
}

impl From<Vocabulary> for VocabRepr {
    fn from(v: Vocabulary) -> Self {
        VocabRepr {
            entries: v.entries,
            min_count: v.min_count,
        }
    }
}

impl Vocabulary {
    /// Build from raw counts, keeping terms with `count >= min_count` and
    /// sorting into canonical order.
    pub fn from_counts(counts: HashMap<String, u64>, min_count: u64) -> Self {
        let mut entries: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|(_, c)| *c >= min_count)
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Vocabulary::from_entries(entries, min_count)
    }

    /// Build from entries in the given order. Duplicate terms keep their first
    /// position.
    pub fn from_entries(entries: Vec<(String, u64)>, min_count: u64) -> Self {
        let mut index = HashMap::with_capacity(entries.len());
        let mut kept = Vec::with_capacity(entries.len());
        for (term, count) in entries {
            if index.contains_key(&term) {
                continue;
            }
            index.insert(term.clone(), kept.len());
            kept.push((term, count));
        }
        let total_tokens = kept.iter().map(|(_, c)| *c).sum();
        Vocabulary {
            entries: kept,
            index,
            total_tokens,
            min_count,
        }
    }

    /// Terms in file order with unknown (zero) counts.
    pub fn from_terms<I: IntoIterator<Item = String>>(terms: I) -> Self {
        Vocabulary::from_entries(terms.into_iter().map(|t| (t, 0)).collect(), 0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, idx: usize) -> &str {
        &self.entries[idx].0
    }

    pub fn count(&self, idx: usize) -> u64 {
        self.entries[idx].1
    }

    /// Corpus count of `term`, zero when unknown.
    pub fn count_of(&self, term: &str) -> u64 {
        self.index(term).map_or(0, |i| self.count(i))
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(t, _)| t.as_str())
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }
}

pub(crate) fn raw_counts(corpus: &Corpus) -> HashMap<String, u64> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for token in corpus.tokens() {
        match counts.get_mut(token) {
            Some(c) => *c += 1,
            None => {
                counts.insert(token.to_owned(), 1);
            }
        }
    }
    counts
}

/// Count every token and keep those occurring at least `min_count` times.
pub fn build_vocab(corpus: &Corpus, min_count: u64) -> Result<Vocabulary> {
    if min_count == 0 {
        return Err(Error::Config("min_count must be at least 1".into()));
    }
    Ok(Vocabulary::from_counts(raw_counts(corpus), min_count))
}

/// Probability of keeping a token during frequent-word subsampling.
///
/// With `f = term_count / total_tokens`, the result is
/// `min(1, (sqrt(f/t) + 1) * t/f)`.
pub fn subsample_keep_prob(term_count: u64, total_tokens: u64, t: f64) -> Result<f64> {
    if term_count == 0 || total_tokens == 0 {
        return Err(Error::Domain(
            "subsampling needs positive term and total counts".into(),
        ));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!(
            "subsampling threshold must be in (0, 1], got {t}"
        )));
    }
    let f = term_count as f64 / total_tokens as f64;
    let p = ((f / t).sqrt() + 1.0) * (t / f);
    Ok(p.min(1.0))
}
