//! Corpus preprocessing: sentence splitting, tokenization, vocabularies and
//! phrase merging.
//!
//! The materialized corpus format is one sentence per line with tokens
//! separated by single spaces. It is what `preprocess` writes and what the
//! training commands read.

mod phrases;
mod tokenize;
pub(crate) mod vocab;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub use phrases::{detect_phrases, phrase_pass, PhraseConfig};
pub use tokenize::{
    decode, is_stripped, split_sentences, tokenize, PHRASE_JOINER, SENTENCE_TERMINATORS,
    TYPOGRAPHIC_STRIP,
};
pub use vocab::{build_vocab, subsample_keep_prob, Vocabulary};

use crate::error::{Error, Result};

/// A tokenized, sentence-split corpus. Every sentence holds at least one
/// token.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Vec<String>>,
    source_path: String,
    token_count: usize,
}

impl Corpus {
    /// Build a corpus from sentences, dropping empty ones.
    pub fn from_sentences<I, S>(sentences: I, source_path: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = Vec<S>>,
        S: Into<String>,
    {
        let sentences: Vec<Vec<String>> = sentences
            .into_iter()
            .map(|s| s.into_iter().map(Into::into).collect::<Vec<_>>())
            .filter(|s| !s.is_empty())
            .collect();
        let token_count = sentences.iter().map(Vec::len).sum();
        Corpus {
            sentences,
            source_path: source_path.into(),
            token_count,
        }
    }

    /// Split already-tokenized lines on whitespace, one sentence per line.
    pub fn from_text_lines(text: &str, source_path: impl Into<String>) -> Self {
        Corpus::from_sentences(
            text.lines()
                .map(|l| l.split_whitespace().map(str::to_owned).collect::<Vec<_>>()),
            source_path,
        )
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flatten().map(String::as_str)
    }

    /// Read a materialized corpus (one sentence per line).
    pub fn read_lines(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = decode(&raw)?;
        Ok(Corpus::from_text_lines(text, path.display().to_string()))
    }

    /// Write the corpus as one sentence per line.
    pub fn write_lines(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for sentence in &self.sentences {
            writeln!(out, "{}", sentence.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// Options for turning raw text into a corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreprocessOptions {
    pub lowercase: bool,
}

/// Stream a raw UTF-8 text file through sentence splitting and tokenization.
pub fn load_corpus(path: impl AsRef<Path>, opts: &PreprocessOptions) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut sentences = Vec::new();
    let mut pending = String::new();
    let mut line = Vec::new();
    let mut offset = 0u64;

    let flush = |pending: &mut String, sentences: &mut Vec<Vec<String>>| {
        let text = if opts.lowercase {
            pending.to_lowercase()
        } else {
            std::mem::take(pending)
        };
        pending.clear();
        let tokens = tokenize(&text);
        if !tokens.is_empty() {
            sentences.push(tokens);
        }
    };

    loop {
        line.clear();
        let n = reader
            .read_until(b'\n', &mut line)
            .map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        let text = std::str::from_utf8(&line).map_err(|e| Error::Decode {
            offset: offset + e.valid_up_to() as u64,
        })?;
        offset += n as u64;
        for c in text.chars() {
            if SENTENCE_TERMINATORS.contains(&c) {
                flush(&mut pending, &mut sentences);
            } else {
                pending.push(c);
            }
        }
    }
    flush(&mut pending, &mut sentences);

    Ok(Corpus::from_sentences(sentences, path.display().to_string()))
}
