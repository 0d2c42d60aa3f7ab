//! Word-embedding and PPMI models for small corpora, with analogy and
//! word-intrusion evaluation.

pub mod cli;
pub mod corpus;
pub mod datasets;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod gridsearch;
pub mod ppmi;

pub use error::{Error, Result};
