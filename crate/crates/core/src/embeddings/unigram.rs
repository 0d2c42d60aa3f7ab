use rand::Rng;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

pub const DEFAULT_NOISE_POWER: f64 = 0.75;

/// Noise distribution for negative sampling, `P(w) ∝ count(w)^power`.
///
/// Zero counts (imported vocabularies) are treated as one so every term stays
/// in the support.
#[derive(Clone, Debug)]
pub struct UnigramTable {
    cumulative: Vec<f64>,
    power: f64,
}

pub fn build_unigram_table(vocab: &Vocabulary, power: f64) -> Result<UnigramTable> {
    UnigramTable::from_counts(vocab.entries().iter().map(|(_, c)| *c), power)
}

impl UnigramTable {
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I, power: f64) -> Result<Self> {
        let weights: Vec<f64> = counts
            .into_iter()
            .map(|c| (c.max(1) as f64).powf(power))
            .collect();
        if weights.is_empty() {
            return Err(Error::Config("noise table needs a non-empty vocabulary".into()));
        }
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(UnigramTable { cumulative, power })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn probability(&self, idx: usize) -> f64 {
        let prev = if idx == 0 { 0.0 } else { self.cumulative[idx - 1] };
        self.cumulative[idx] - prev
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}
