use crate::error::{Error, Result};

/// Characters that end a sentence.
pub const SENTENCE_TERMINATORS: [char; 3] = ['.', '?', '!'];

/// Typographic quotes and dashes stripped in addition to ASCII punctuation.
pub const TYPOGRAPHIC_STRIP: [char; 6] = ['\u{201C}', '\u{201D}', '\u{2018}', '\u{2019}', '\u{2014}', '\u{2013}'];

/// Separator used when merging phrase tokens, never stripped.
pub const PHRASE_JOINER: char = '_';

/// True when `c` belongs to the strip set: ASCII punctuation except the
/// phrase joiner, plus typographic quotes and dashes.
pub fn is_stripped(c: char) -> bool {
    (c.is_ascii_punctuation() && c != PHRASE_JOINER) || TYPOGRAPHIC_STRIP.contains(&c)
}

/// Decode raw bytes, reporting the byte offset of the first invalid sequence.
pub fn decode(raw: &[u8]) -> Result<&str> {
    std::str::from_utf8(raw).map_err(|e| Error::Decode {
        offset: e.valid_up_to() as u64,
    })
}

/// Naive sentence splitter: every `.`, `?` or `!` ends a sentence, with no
/// abbreviation handling. Sentences are trimmed and empty ones dropped.
pub fn split_sentences(raw: &[u8]) -> Result<Vec<String>> {
    let text = decode(raw)?;
    Ok(split_str(text))
}

pub(crate) fn split_str(text: &str) -> Vec<String> {
    text.split(SENTENCE_TERMINATORS)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Replace strip-set characters with spaces and split on whitespace. Case is
/// preserved.
pub fn tokenize(sentence: &str) -> Vec<String> {
    let cleaned: String = sentence
        .chars()
        .map(|c| if is_stripped(c) { ' ' } else { c })
        .collect();
    cleaned.split_whitespace().map(str::to_owned).collect()
}
