//! Dense word embeddings: word2vec-style skip-gram and CBOW training with
//! negative sampling or hierarchical softmax, incremental updates,
//! persistence and similarity queries.

mod huffman;
mod io;
mod sgd;
mod similarity;
mod train;
mod unigram;

use std::fmt;
use std::str::FromStr;

use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use huffman::{build_huffman, HuffmanTree};
pub use io::{
    format_component, load_binary, load_model, load_text, save_binary, save_text, write_text,
    BINARY_MAGIC,
};
pub use sgd::{train_step, Objective, Real, StepMode};
pub use similarity::{cosine, DenseIndex};
pub use train::{train, train_with_stats, update_model, TrainingStats, UpdateOptions};
pub use unigram::{build_unigram_table, UnigramTable, DEFAULT_NOISE_POWER};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    SkipGram,
    Cbow,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::SkipGram => "skip-gram",
            Algorithm::Cbow => "cbow",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "skip-gram" | "skipgram" | "sg" => Ok(Algorithm::SkipGram),
            "cbow" => Ok(Algorithm::Cbow),
            _ => Err(Error::Usage(format!(
                "unknown algorithm '{s}' (expected skip-gram or cbow)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    NegativeSampling { negative: usize },
    HierarchicalSoftmax,
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Loss::NegativeSampling { negative } => write!(f, "ns{negative}"),
            Loss::HierarchicalSoftmax => f.write_str("hs"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub dims: usize,
    pub algorithm: Algorithm,
    pub loss: Loss,
    /// Maximum context half-width.
    pub window: usize,
    pub epochs: usize,
    pub alpha0: f64,
    pub alpha_min: f64,
    /// Subsampling threshold; zero disables subsampling.
    pub subsample_t: f64,
    pub min_count: u64,
    pub seed: u64,
    pub workers: usize,
    /// Let windows run across sentence boundaries.
    pub cross_sentence_window: bool,
    /// Always use the full window instead of drawing it from `1..=window`.
    pub fixed_window: bool,
    pub noise_power: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            dims: 100,
            algorithm: Algorithm::Cbow,
            loss: Loss::NegativeSampling { negative: 5 },
            window: 5,
            epochs: 5,
            alpha0: 0.025,
            alpha_min: 0.0001,
            subsample_t: 1e-3,
            min_count: 5,
            seed: 1,
            workers: 1,
            cross_sentence_window: false,
            fixed_window: false,
            noise_power: DEFAULT_NOISE_POWER,
        }
    }
}

/// Named settings for the standard model configurations.
pub const PRESETS: [&str; 4] = [
    "w2v-default",
    "w2v-ww12-i15-ns",
    "w2v-ww12-i15-hs",
    "w2v-CBOW",
];

impl TrainingConfig {
    pub fn preset(name: &str) -> Option<Self> {
        let base = TrainingConfig {
            dims: 300,
            ..TrainingConfig::default()
        };
        let tuned = TrainingConfig {
            algorithm: Algorithm::SkipGram,
            window: 12,
            epochs: 15,
            loss: Loss::NegativeSampling { negative: 15 },
            ..base.clone()
        };
        match name {
            "w2v-default" => Some(base),
            "w2v-ww12-i15-ns" => Some(tuned),
            "w2v-ww12-i15-hs" => Some(TrainingConfig {
                loss: Loss::HierarchicalSoftmax,
                ..tuned
            }),
            "w2v-CBOW" => Some(TrainingConfig {
                algorithm: Algorithm::Cbow,
                ..tuned
            }),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.dims == 0 {
            return fail("dims must be >= 1");
        }
        if self.window == 0 {
            return fail("window must be >= 1");
        }
        if self.epochs == 0 {
            return fail("epochs must be >= 1");
        }
        if !(self.alpha_min > 0.0 && self.alpha0 > self.alpha_min) {
            return fail("learning rates must satisfy alpha0 > alpha_min > 0");
        }
        if let Loss::NegativeSampling { negative: 0 } = self.loss {
            return fail("negative sampling needs at least one noise word");
        }
        if self.workers == 0 {
            return fail("workers must be >= 1");
        }
        if self.min_count == 0 {
            return fail("min_count must be >= 1");
        }
        if !(self.subsample_t >= 0.0 && self.subsample_t <= 1.0) {
            return fail("subsample threshold must be in [0, 1]");
        }
        Ok(())
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T = f32> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Float> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    /// Entries uniform in `[-0.5/cols, 0.5/cols)`.
    pub fn uniform_init<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        m.fill_uniform(0..rows, rng);
        m
    }

    pub(crate) fn fill_uniform<R: Rng>(&mut self, rows: std::ops::Range<usize>, rng: &mut R) {
        let scale = 1.0 / self.cols as f64;
        for r in rows {
            for x in self.row_mut(r) {
                *x = T::from((rng.gen::<f64>() - 0.5) * scale).unwrap();
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// A trained or imported dense model.
///
/// `input` holds the word vectors that queries use. `output` holds context
/// vectors (negative sampling) or inner-node vectors (hierarchical softmax,
/// first `|V| - 1` rows).
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    pub vocab: Vocabulary,
    pub input: Matrix<f32>,
    pub output: Matrix<f32>,
    pub config: TrainingConfig,
    pub trained_tokens: u64,
}

impl EmbeddingModel {
    pub fn new(
        vocab: Vocabulary,
        input: Matrix<f32>,
        output: Matrix<f32>,
        config: TrainingConfig,
    ) -> Result<Self> {
        if input.rows() != vocab.len() || output.rows() != vocab.len() {
            return Err(Error::Config(format!(
                "matrix rows ({}, {}) do not match vocabulary size {}",
                input.rows(),
                output.rows(),
                vocab.len()
            )));
        }
        if input.cols() != output.cols() || input.cols() != config.dims {
            return Err(Error::Config("inconsistent vector dimensionality".into()));
        }
        Ok(EmbeddingModel {
            vocab,
            input,
            output,
            config,
            trained_tokens: 0,
        })
    }

    pub fn dims(&self) -> usize {
        self.input.cols()
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vector(&self, term: &str) -> Option<&[f32]> {
        self.vocab.index(term).map(|i| self.input.row(i))
    }

    pub fn is_finite(&self) -> bool {
        self.input.is_finite() && self.output.is_finite()
    }

    /// Read-only query view with unit-normalized rows.
    pub fn index(&self) -> DenseIndex {
        DenseIndex::from_model(self)
    }

    /// Most similar terms by cosine; see [`DenseIndex::most_similar`].
    pub fn most_similar(
        &self,
        positives: &[&str],
        negatives: &[&str],
        topn: usize,
        exclude: &[&str],
    ) -> Result<Vec<(String, f64)>> {
        self.index().most_similar(positives, negatives, topn, exclude)
    }
}
