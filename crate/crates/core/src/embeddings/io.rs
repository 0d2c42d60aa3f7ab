//! Model persistence.
//!
//! Text format: a header line `<|V|> <dims>` followed by one line per term,
//! `term v1 ... vdims`, space-separated, components written with six
//! significant digits. Headerless files (GloVe output) are accepted on load.
//!
//! Binary format (all integers and floats little-endian):
//!
//! ```text
//! magic      8 bytes  "EMBLAB01"
//! |V|        u64
//! dims       u64
//! trained    u64      cumulative trained tokens
//! cfg_len    u64      length of the JSON training configuration
//! cfg        cfg_len bytes
//! |V| times: u32 byte length, UTF-8 term, u64 count
//! input      |V|·dims f32
//! output     |V|·dims f32
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EmbeddingModel, Matrix, TrainingConfig};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 8] = b"EMBLAB01";

/// Format a component with six significant digits, choosing fixed or
/// exponent notation like C's `%g`.
pub fn format_component(x: f32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };

    if (-4..6).contains(&exp) {
        let (int_part, frac_part) = if exp >= 0 {
            let split = exp as usize + 1;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
        };
        let frac = frac_part.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    } else {
        let rest = digits[1..].trim_end_matches('0');
        if rest.is_empty() {
            format!("{sign}{}e{exp}", &digits[..1])
        } else {
            format!("{sign}{}.{rest}e{exp}", &digits[..1])
        }
    }
}

pub fn write_text<W: Write>(model: &EmbeddingModel, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{} {}", model.len(), model.dims())?;
    let mut line = String::new();
    for (i, term) in model.vocab.terms().enumerate() {
        line.clear();
        line.push_str(term);
        for &x in model.input.row(i) {
            line.push(' ');
            line.push_str(&format_component(x));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn save_text(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_text(model, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Load a text vector file as a query-only model: counts are zero and the
/// output matrix is all zeros.
pub fn load_text(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut terms = Vec::new();
    let mut data = Vec::new();
    let mut declared: Option<(usize, usize)> = None;
    let mut dims: Option<usize> = None;

    for (lineno, line) in reader.split(b'\n').enumerate() {
        let lineno = lineno + 1;
        let raw = line.map_err(|e| Error::io(path, e))?;
        let text = std::str::from_utf8(&raw)
            .map_err(|_| Error::format(path, lineno, "line is not valid UTF-8"))?;
        let fields: Vec<&str> = text.split_ascii_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if lineno == 1 && fields.len() == 2 {
            let parse = |s: &str| s.parse::<usize>().ok();
            match (parse(fields[0]), parse(fields[1])) {
                (Some(n), Some(d)) if d > 0 => {
                    declared = Some((n, d));
                    dims = Some(d);
                    continue;
                }
                _ => return Err(Error::format(path, lineno, "malformed header, expected '<count> <dims>'")),
            }
        }
        let width = *dims.get_or_insert(fields.len() - 1);
        if width == 0 || fields.len() != width + 1 {
            return Err(Error::format(
                path,
                lineno,
                format!("expected {} vector components, found {}", width, fields.len() - 1),
            ));
        }
        if let Some((n, _)) = declared {
            if terms.len() == n {
                return Err(Error::format(path, lineno, format!("more rows than the {n} declared")));
            }
        }
        for f in &fields[1..] {
            let x: f32 = f
                .parse()
                .map_err(|_| Error::format(path, lineno, format!("invalid number '{f}'")))?;
            data.push(x);
        }
        terms.push(fields[0].to_string());
    }

    if let Some((n, _)) = declared {
        if terms.len() != n {
            return Err(Error::format(
                path,
                1,
                format!("header declares {n} rows but the file has {}", terms.len()),
            ));
        }
    }
    let dims = dims.ok_or_else(|| Error::format(path, 1, "empty vector file"))?;
    let vocab = Vocabulary::from_terms(terms.iter().cloned());
    if vocab.len() != terms.len() {
        return Err(Error::format(path, 1, "duplicate terms in vector file"));
    }
    let rows = vocab.len();
    let config = TrainingConfig {
        dims,
        min_count: 1,
        ..TrainingConfig::default()
    };
    EmbeddingModel::new(
        vocab,
        Matrix::from_vec(rows, dims, data),
        Matrix::zeros(rows, dims),
        config,
    )
}

pub fn save_binary(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |e| Error::io(path, e);
    let file = File::create(path).map_err(io)?;
    let mut out = BufWriter::new(file);
    let config = serde_json::to_vec(&model.config).expect("config serializes");
    out.write_all(BINARY_MAGIC).map_err(io)?;
    for v in [
        model.len() as u64,
        model.dims() as u64,
        model.trained_tokens,
        config.len() as u64,
    ] {
        out.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    out.write_all(&config).map_err(io)?;
    for (term, count) in model.vocab.entries() {
        out.write_all(&(term.len() as u32).to_le_bytes()).map_err(io)?;
        out.write_all(term.as_bytes()).map_err(io)?;
        out.write_all(&count.to_le_bytes()).map_err(io)?;
    }
    for m in [&model.input, &model.output] {
        for x in m.as_slice() {
            out.write_all(&x.to_le_bytes()).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

struct ByteReader<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::format(
                self.path,
                0,
                format!("truncated binary model at byte {}", self.pos),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let mut r = ByteReader {
        path,
        bytes: &bytes,
        pos: 0,
    };
    if r.take(8)? != BINARY_MAGIC {
        return Err(Error::format(path, 0, "not an embedlab binary model"));
    }
    let words = r.u64()? as usize;
    let dims = r.u64()? as usize;
    let trained = r.u64()?;
    let cfg_len = r.u64()? as usize;
    let config: TrainingConfig = serde_json::from_slice(r.take(cfg_len)?)
        .map_err(|e| Error::format(path, 0, format!("bad configuration block: {e}")))?;
    if config.dims != dims {
        return Err(Error::format(path, 0, "configuration dims disagree with header"));
    }
    let mut entries = Vec::with_capacity(words);
    for _ in 0..words {
        let len = r.u32()? as usize;
        let term = std::str::from_utf8(r.take(len)?)
            .map_err(|_| Error::format(path, 0, "term is not valid UTF-8"))?
            .to_string();
        let count = r.u64()?;
        entries.push((term, count));
    }
    let mut read_matrix = || -> Result<Matrix<f32>> {
        let raw = r.take(words * dims * 4)?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Matrix::from_vec(words, dims, data))
    };
    let input = read_matrix()?;
    let output = read_matrix()?;
    if r.pos != bytes.len() {
        return Err(Error::format(path, 0, "trailing bytes after binary model"));
    }
    let min_count = config.min_count;
    let vocab = Vocabulary::from_entries(entries, min_count);
    if vocab.len() != words {
        return Err(Error::format(path, 0, "duplicate terms in binary model"));
    }
    let mut model = EmbeddingModel::new(vocab, input, output, config)?;
    model.trained_tokens = trained;
    Ok(model)
}

/// Load either format, detected by the binary magic.
pub fn load_model(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let mut magic = [0u8; 8];
    let n = File::open(path)
        .and_then(|mut f| f.read(&mut magic))
        .map_err(|e| Error::io(path, e))?;
    if n == 8 && &magic == BINARY_MAGIC {
        load_binary(path)
    } else {
        load_text(path)
    }
}
