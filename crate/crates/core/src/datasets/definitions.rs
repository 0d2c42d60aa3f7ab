//! Task-definition files and dataset generation.
//!
//! ```text
//! # comments and blank lines are ignored
//! [analogy husband-wife]
//! Ned,Catelyn
//! Robert,Cersei
//!
//! [intrusion families]
//! triple: Lannister,Stark,Martell
//! d1: Theon,o2,o3,o4,o5
//! d2: ...
//! d3: ...
//! d4: ...
//! ```
//!
//! Every triple needs exactly four outlier groups of five terms each; `d1`
//! holds the hardest outliers and `d4` the easiest.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{AnalogyQuestion, IntrusionQuestion};
use crate::error::{Error, Result};

pub const OUTLIERS_PER_GROUP: usize = 5;
const GROUPS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalogySection {
    pub name: String,
    pub pairs: Vec<(String, String)>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntrusionTriple {
    pub terms: [String; 3],
    /// Outlier groups by difficulty, hardest first.
    pub outliers: Vec<Vec<String>>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntrusionSection {
    pub name: String,
    pub triples: Vec<IntrusionTriple>,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaskDefinition {
    pub analogy: Vec<AnalogySection>,
    pub intrusion: Vec<IntrusionSection>,
    pub source: PathBuf,
}

pub fn parse_definitions(path: impl AsRef<Path>) -> Result<TaskDefinition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_definitions_str(&text, path)
}

enum Block {
    None,
    Analogy,
    Intrusion,
}

fn split_terms(list: &str, path: &Path, line: usize) -> Result<Vec<String>> {
    let terms: Vec<String> = list.split(',').map(|t| t.trim().to_string()).collect();
    for t in &terms {
        if t.is_empty() {
            return Err(Error::definition(path, line, "empty term"));
        }
        if t.contains(char::is_whitespace) {
            return Err(Error::definition(
                path,
                line,
                format!("term '{t}' contains whitespace; join words with '_'"),
            ));
        }
    }
    Ok(terms)
}

pub fn parse_definitions_str(text: &str, path: impl AsRef<Path>) -> Result<TaskDefinition> {
    let path = path.as_ref();
    let mut defs = TaskDefinition {
        source: path.to_path_buf(),
        ..TaskDefinition::default()
    };
    let mut block = Block::None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| Error::definition(path, lineno, "unterminated block header"))?;
            let (kind, name) = header
                .trim()
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::definition(path, lineno, "block header needs a kind and a name"))?;
            let name = name.trim().to_string();
            match kind {
                "analogy" => {
                    defs.analogy.push(AnalogySection { name, pairs: Vec::new(), line: lineno });
                    block = Block::Analogy;
                }
                "intrusion" => {
                    defs.intrusion.push(IntrusionSection { name, triples: Vec::new(), line: lineno });
                    block = Block::Intrusion;
                }
                other => {
                    return Err(Error::definition(path, lineno, format!("unknown block kind '{other}'")))
                }
            }
            continue;
        }

        match block {
            Block::None => {
                return Err(Error::definition(path, lineno, "line outside of any block"));
            }
            Block::Analogy => {
                let terms = split_terms(line, path, lineno)?;
                let [a, b]: [String; 2] = terms.try_into().map_err(|t: Vec<String>| {
                    Error::definition(path, lineno, format!("expected a pair, found {} terms", t.len()))
                })?;
                if a == b {
                    return Err(Error::definition(path, lineno, "pair repeats a term"));
                }
                defs.analogy.last_mut().unwrap().pairs.push((a, b));
            }
            Block::Intrusion => {
                let (key, rest) = line
                    .split_once(':')
                    .ok_or_else(|| Error::definition(path, lineno, "expected 'triple:' or 'dN:'"))?;
                let key = key.trim();
                let terms = split_terms(rest, path, lineno)?;
                let section = defs.intrusion.last_mut().unwrap();
                if key == "triple" {
                    let terms: [String; 3] = terms.try_into().map_err(|t: Vec<String>| {
                        Error::definition(path, lineno, format!("triple needs 3 terms, found {}", t.len()))
                    })?;
                    if terms[0] == terms[1] || terms[0] == terms[2] || terms[1] == terms[2] {
                        return Err(Error::definition(path, lineno, "triple terms must be distinct"));
                    }
                    section.triples.push(IntrusionTriple { terms, outliers: Vec::new(), line: lineno });
                    continue;
                }
                let group: usize = key
                    .strip_prefix('d')
                    .and_then(|d| d.parse().ok())
                    .filter(|d| (1..=GROUPS).contains(d))
                    .ok_or_else(|| Error::definition(path, lineno, format!("unknown key '{key}'")))?;
                let triple = section
                    .triples
                    .last_mut()
                    .ok_or_else(|| Error::definition(path, lineno, "outlier group before any triple"))?;
                if triple.outliers.len() + 1 != group {
                    return Err(Error::definition(
                        path,
                        lineno,
                        format!("expected d{}, found d{group}", triple.outliers.len() + 1),
                    ));
                }
                if terms.len() != OUTLIERS_PER_GROUP {
                    return Err(Error::definition(
                        path,
                        lineno,
                        format!("outlier group needs {OUTLIERS_PER_GROUP} terms, found {}", terms.len()),
                    ));
                }
                if let Some(t) = terms.iter().find(|t| triple.terms.contains(t)) {
                    return Err(Error::definition(path, lineno, format!("outlier '{t}' is part of the triple")));
                }
                triple.outliers.push(terms);
            }
        }
    }
    Ok(defs)
}

/// All ordered pairs of distinct pairs in each section: `n·(n−1)` questions
/// for a section with `n` pairs.
pub fn generate_analogy_questions(defs: &TaskDefinition) -> Result<Vec<AnalogyQuestion>> {
    let mut questions = Vec::new();
    for section in &defs.analogy {
        if section.pairs.len() < 2 {
            return Err(Error::definition(
                &defs.source,
                section.line,
                format!("analogy section '{}' needs at least 2 pairs", section.name),
            ));
        }
        for (i, (a, a_star)) in section.pairs.iter().enumerate() {
            for (j, (b, b_star)) in section.pairs.iter().enumerate() {
                if i == j {
                    continue;
                }
                let q = AnalogyQuestion::new(a, a_star, b, b_star, &section.name)
                    .map_err(|m| Error::definition(&defs.source, section.line, m))?;
                questions.push(q);
            }
        }
    }
    Ok(questions)
}

fn shuffle_seed(section: &str, triple: &[String; 3], outlier: &str) -> u64 {
    let mut h = Sha256::new();
    for part in [section, &triple[0], &triple[1], &triple[2], outlier] {
        h.update(part.as_bytes());
        h.update([0x1f]);
    }
    u64::from_le_bytes(h.finalize()[..8].try_into().unwrap())
}

/// Twenty questions per triple, one per outlier. The intruder's position is
/// fixed by a shuffle seeded from the section, triple and outlier.
pub fn generate_intrusion_questions(defs: &TaskDefinition) -> Result<Vec<IntrusionQuestion>> {
    let mut questions = Vec::new();
    for section in &defs.intrusion {
        for triple in &section.triples {
            if triple.outliers.len() != GROUPS
                || triple.outliers.iter().any(|g| g.len() != OUTLIERS_PER_GROUP)
            {
                return Err(Error::definition(
                    &defs.source,
                    triple.line,
                    format!(
                        "triple needs {GROUPS} outlier groups of {OUTLIERS_PER_GROUP} terms"
                    ),
                ));
            }
            for (g, group) in triple.outliers.iter().enumerate() {
                for outlier in group {
                    let mut terms = [
                        triple.terms[0].clone(),
                        triple.terms[1].clone(),
                        triple.terms[2].clone(),
                        outlier.clone(),
                    ];
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(shuffle_seed(&section.name, &triple.terms, outlier));
                    terms.shuffle(&mut rng);
                    let q = IntrusionQuestion::new(terms, outlier, &section.name, g as u8 + 1)
                        .map_err(|m| Error::definition(&defs.source, triple.line, m))?;
                    questions.push(q);
                }
            }
        }
    }
    Ok(questions)
}
