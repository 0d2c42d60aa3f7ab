//! Analogy dataset files: `: section` header lines followed by
//! `A A* B B*` question lines.

use std::path::Path;

use super::AnalogyQuestion;
use crate::error::{Error, Result};

pub fn parse_analogy_file(path: impl AsRef<Path>) -> Result<Vec<AnalogyQuestion>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_analogy_str(&text, path)
}

pub fn parse_analogy_str(text: &str, path: impl AsRef<Path>) -> Result<Vec<AnalogyQuestion>> {
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
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::format(
                path,
                lineno,
                format!("expected 4 terms, found {}", fields.len()),
            ));
        }
        let q = AnalogyQuestion::new(fields[0], fields[1], fields[2], fields[3], section.clone())
            .map_err(|m| Error::format(path, lineno, m))?;
        questions.push(q);
    }
    Ok(questions)
}

pub fn write_analogy_string(questions: &[AnalogyQuestion]) -> String {
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
        out.push_str(&q.terms().join(" "));
        out.push('\n');
    }
    out
}

pub fn write_analogy_file(questions: &[AnalogyQuestion], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_analogy_string(questions)).map_err(|e| Error::io(path, e))
}
