//! Text persistence for PPMI models:
//!
//! ```text
//! ppmi <vocab size> <window>
//! <term> <count>           one line per vocabulary entry
//! <word> <context> <weight>  one line per stored cell
//! ```
//!
//! Weights are written with shortest round-trip precision, so a model
//! reloads bit-identically.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::SparsePpmiModel;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

pub fn write_ppmi<W: Write>(model: &SparsePpmiModel, out: &mut W) -> std::io::Result<()> {
    let vocab = model.vocab();
    writeln!(out, "ppmi {} {}", vocab.len(), model.window())?;
    for (term, count) in vocab.entries() {
        writeln!(out, "{term} {count}")?;
    }
    for (w, c, v) in model.triplets() {
        writeln!(out, "{} {} {v:?}", vocab.term(w), vocab.term(c))?;
    }
    Ok(())
}

pub fn save_ppmi(model: &SparsePpmiModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_ppmi(model, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_ppmi(path: impl AsRef<Path>) -> Result<SparsePpmiModel> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let next = |lines: &mut std::iter::Enumerate<std::io::Lines<BufReader<std::fs::File>>>| {
        lines
            .next()
            .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(|e| Error::io(path, e)))
            .transpose()
    };

    let (_, header) = next(&mut lines)?.ok_or_else(|| Error::format(path, 1, "empty PPMI file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (size, window) = match fields.as_slice() {
        ["ppmi", n, w] => match (n.parse::<usize>(), w.parse::<usize>()) {
            (Ok(n), Ok(w)) => (n, w),
            _ => return Err(Error::format(path, 1, "malformed PPMI header")),
        },
        _ => return Err(Error::format(path, 1, "expected 'ppmi <vocab size> <window>'")),
    };

    let mut entries = Vec::with_capacity(size);
    for k in 0..size {
        let (lineno, line) = next(&mut lines)?
            .ok_or_else(|| Error::format(path, k + 2, format!("vocabulary ends after {k} of {size} terms")))?;
        let mut it = line.split_whitespace();
        let (Some(term), Some(count), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::format(path, lineno, "expected '<term> <count>'"));
        };
        let count: u64 = count
            .parse()
            .map_err(|_| Error::format(path, lineno, format!("invalid count '{count}'")))?;
        entries.push((term.to_string(), count));
    }
    let vocab = Vocabulary::from_entries(entries, 0);
    if vocab.len() != size {
        return Err(Error::format(path, 2, "duplicate vocabulary term"));
    }

    let mut cells = Vec::new();
    while let Some((lineno, line)) = next(&mut lines)? {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(w), Some(c), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(Error::format(path, lineno, "expected '<word> <context> <weight>'"));
        };
        let idx = |t: &str| {
            vocab
                .index(t)
                .map(|i| i as u32)
                .ok_or_else(|| Error::format(path, lineno, format!("'{t}' is not in the vocabulary block")))
        };
        let v: f64 = v
            .parse()
            .map_err(|_| Error::format(path, lineno, format!("invalid weight '{v}'")))?;
        cells.push((idx(w)?, idx(c)?, v));
    }
    SparsePpmiModel::from_triplets(vocab, window, cells).map_err(|e| Error::format(path, 0, e.to_string()))
}
