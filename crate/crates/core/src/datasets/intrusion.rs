//! Word-intrusion dataset files: `: section` header lines followed by
//! `t1 t2 t3 t4 | outlier | difficulty` question lines. The difficulty field
//! may be missing, in which case the question is unlabeled (difficulty 0).

use std::path::Path;

use super::IntrusionQuestion;
use crate::error::{Error, Result};

const SEPARATOR: char = '|';

/// Whether a missing difficulty field is accepted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ParseMode {
    Strict,
    #[default]
    Lenient,
}

pub fn parse_intrusion_file(
    path: impl AsRef<Path>,
    mode: ParseMode,
) -> Result<Vec<IntrusionQuestion>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_intrusion_str(&text, path, mode)
}

pub fn parse_intrusion_str(
    text: &str,
    path: impl AsRef<Path>,
    mode: ParseMode,
) -> Result<Vec<IntrusionQuestion>> {
    let path = path.as_ref();
    let mut section = String::new();
    let mut questions = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim_end_matches('\r');
        if let Some(name) = line.strip_prefix(':') {
            section = name.trim().to_string();
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| Error::format(path, lineno, m);
        let parts: Vec<&str> = line.split(SEPARATOR).map(str::trim).collect();
        let difficulty = match (parts.len(), mode) {
            (3, _) => parts[2]
                .parse::<u8>()
                .map_err(|_| err(format!("invalid difficulty '{}'", parts[2])))?,
            (2, ParseMode::Lenient) => 0,
            (2, ParseMode::Strict) => return Err(err("missing difficulty field".into())),
            (n, _) => return Err(err(format!("expected 2 or 3 '|'-separated fields, found {n}"))),
        };
        let terms: Vec<&str> = parts[0].split_whitespace().collect();
        let terms: [String; 4] = match terms.as_slice() {
            [a, b, c, d] => [a, b, c, d].map(|t| t.to_string()),
            _ => return Err(err(format!("expected 4 terms, found {}", terms.len()))),
        };
        let outlier = parts[1];
        if outlier.split_whitespace().count() != 1 {
            return Err(err("outlier field must hold exactly one term".into()));
        }
        let q = IntrusionQuestion::new(terms, outlier, section.clone(), difficulty).map_err(err)?;
        questions.push(q);
    }
    Ok(questions)
}

pub fn write_intrusion_string(questions: &[IntrusionQuestion]) -> String {
    let mut out = String::new();
    let mut current: Option<&str> = None;
    for q in questions {
        if current != Some(q.section.as_str()) {
            if !(current.is_none() && q.section.is_empty()) {
                out.push_str(": ");
                out.push_str(&q.section);
                out.push('\n');
            }
            current = Some(&q.section);
        }
        out.push_str(&q.terms.join(" "));
        out.push_str(" | ");
        out.push_str(&q.outlier);
        if q.difficulty > 0 {
            out.push_str(" | ");
            out.push_str(&q.difficulty.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn write_intrusion_file(questions: &[IntrusionQuestion], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_intrusion_string(questions)).map_err(|e| Error::io(path, e))
}
