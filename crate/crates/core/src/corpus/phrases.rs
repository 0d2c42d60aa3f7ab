use std::collections::HashMap;

use super::{Corpus, PHRASE_JOINER};
use crate::error::{Error, Result};

/// Settings for collocation merging.
///
/// Pass `k` (zero-based) uses `threshold * threshold_decay^k`, so the default
/// schedule is 10 then 5.
#[derive(Clone, Debug, PartialEq)]
pub struct PhraseConfig {
    pub delta: f64,
    pub threshold: f64,
    pub passes: usize,
    pub threshold_decay: f64,
}

impl Default for PhraseConfig {
    fn default() -> Self {
        PhraseConfig {
            delta: 5.0,
            threshold: 10.0,
            passes: 2,
            threshold_decay: 0.5,
        }
    }
}

impl PhraseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) {
            return Err(Error::Config("phrase delta must be >= 0".into()));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::Config("phrase threshold must be > 0".into()));
        }
        if self.passes == 0 {
            return Err(Error::Config("phrase passes must be >= 1".into()));
        }
        if !(self.threshold_decay > 0.0) {
            return Err(Error::Config("phrase threshold decay must be > 0".into()));
        }
        Ok(())
    }

    pub fn pass_threshold(&self, pass: usize) -> f64 {
        self.threshold * self.threshold_decay.powi(pass as i32)
    }
}

/// Merge collocations over `cfg.passes` passes.
pub fn detect_phrases(corpus: &Corpus, cfg: &PhraseConfig) -> Corpus {
    let mut current = corpus.clone();
    for pass in 0..cfg.passes {
        current = phrase_pass(&current, cfg.delta, cfg.pass_threshold(pass));
    }
    current
}

/// One left-to-right merging pass.
///
/// Adjacent tokens `a b` inside a sentence become `a_b` when
/// `(count(ab) - delta) * N / (count(a) * count(b)) > threshold`, with `N` the
/// corpus token count. A merged pair consumes both tokens.
pub fn phrase_pass(corpus: &Corpus, delta: f64, threshold: f64) -> Corpus {
    let mut unigrams: HashMap<&str, u64> = HashMap::new();
    let mut bigrams: HashMap<(&str, &str), u64> = HashMap::new();
    for sentence in corpus.sentences() {
        for (i, token) in sentence.iter().enumerate() {
            *unigrams.entry(token).or_default() += 1;
            if let Some(next) = sentence.get(i + 1) {
                *bigrams.entry((token, next)).or_default() += 1;
            }
        }
    }
    let total = corpus.token_count() as f64;
    let score = |a: &str, b: &str| -> f64 {
        let ab = bigrams.get(&(a, b)).copied().unwrap_or(0) as f64;
        let ca = unigrams[a] as f64;
        let cb = unigrams[b] as f64;
        (ab - delta) * total / (ca * cb)
    };

    let sentences = corpus.sentences().iter().map(|sentence| {
        let mut out = Vec::with_capacity(sentence.len());
        let mut i = 0;
        while i < sentence.len() {
            if i + 1 < sentence.len() && score(&sentence[i], &sentence[i + 1]) > threshold {
                out.push(format!("{}{}{}", sentence[i], PHRASE_JOINER, sentence[i + 1]));
                i += 2;
            } else {
                out.push(sentence[i].clone());
                i += 1;
            }
        }
        out
    });
    Corpus::from_sentences(sentences.collect::<Vec<_>>(), corpus.source_path())
}
