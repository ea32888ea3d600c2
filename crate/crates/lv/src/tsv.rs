//! Corpus and tagset text formats.
//!
//! A corpus file holds one token per line as `surface<TAB>pos<TAB>state`,
//! sentences separated by a blank line, and `#` comment lines. Decode input
//! may leave annotations out: a line can carry the surface alone, and `_`
//! stands for a missing tag or state.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lv_core::corpus::{BOUNDARY_SURFACE, Corpus, IngredientState, Sentence, TagSet, Token};

use crate::error::{LvError, Result};

pub const MISSING: &str = "_";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Annotation {
    /// Every token must carry a tag and a state.
    Required,
    /// Tags and states may be absent or `_`.
    Optional,
}

fn parse_err(source_name: &str, line: usize, message: impl Into<String>) -> LvError {
    LvError::Parse { source_name: source_name.to_string(), line, message: message.into() }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| LvError::io(path, e))
}

pub fn parse_tagset(text: &str, source_name: &str) -> Result<TagSet> {
    let names: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    TagSet::new(names.iter().copied()).map_err(|e| parse_err(source_name, 0, e.to_string()))
}

pub fn load_tagset(path: &Path) -> Result<TagSet> {
    parse_tagset(&read_text(path)?, &path.display().to_string())
}

pub fn write_tagset(tagset: &TagSet) -> String {
    let mut out = String::new();
    for name in tagset.names() {
        out.push_str(name);
        out.push('\n');
    }
    out
}

fn parse_token(line: &str, tagset: &TagSet, mode: Annotation, source_name: &str, n: usize) -> Result<Token> {
    let fields: Vec<&str> = line.split('\t').collect();
    let surface = fields[0];
    if surface.is_empty() {
        return Err(parse_err(source_name, n, "empty surface"));
    }
    if fields.len() > 3 {
        return Err(parse_err(source_name, n, format!("expected 3 columns, found {}", fields.len())));
    }
    if mode == Annotation::Required && fields.len() != 3 {
        return Err(parse_err(source_name, n, format!("expected 3 columns, found {}", fields.len())));
    }
    let field = |i: usize| fields.get(i).copied().filter(|f| *f != MISSING);
    if mode == Annotation::Required && (field(1).is_none() || field(2).is_none()) {
        return Err(parse_err(source_name, n, "annotation required"));
    }
    let pos = match field(1) {
        Some(name) => Some(
            tagset.index_of(name).ok_or_else(|| parse_err(source_name, n, format!("unknown POS tag `{name}`")))?,
        ),
        None => None,
    };
    let state = match field(2) {
        Some(s) => {
            let v: u32 = s.parse().map_err(|_| parse_err(source_name, n, format!("invalid state `{s}`")))?;
            Some(IngredientState::new(v).map_err(|e| parse_err(source_name, n, e.to_string()))?)
        }
        None => None,
    };
    Ok(Token { surface: surface.to_string(), pos, state })
}

fn finish_sentence(tokens: Vec<Token>, tagset: &TagSet, source_name: &str, line: usize) -> Result<Sentence> {
    let is_boundary = |t: &Token| t.surface == BOUNDARY_SURFACE && t.pos == Some(tagset.boundary());
    let padded = tokens.len() >= 2 && is_boundary(&tokens[0]) && is_boundary(&tokens[tokens.len() - 1]);
    if padded {
        Sentence::from_padded(tokens, tagset).map_err(|e| parse_err(source_name, line, e.to_string()))
    } else {
        Ok(Sentence::from_interior(tokens, tagset))
    }
}

/// Parses sentences; a sentence already wrapped in boundary tokens is kept as is.
pub fn parse_sentences(text: &str, tagset: &TagSet, mode: Annotation, source_name: &str) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut start = 0;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(finish_sentence(std::mem::take(&mut current), tagset, source_name, start)?);
            }
            continue;
        }
        if current.is_empty() {
            start = n;
        }
        current.push(parse_token(line, tagset, mode, source_name, n)?);
    }
    if !current.is_empty() {
        sentences.push(finish_sentence(current, tagset, source_name, start)?);
    }
    Ok(sentences)
}

pub fn parse_corpus(text: &str, tagset: &TagSet, source_name: &str) -> Result<Corpus> {
    let sentences = parse_sentences(text, tagset, Annotation::Required, source_name)?;
    if sentences.is_empty() {
        return Err(lv_core::Error::EmptyCorpus.into());
    }
    Ok(Corpus::new(tagset.clone(), sentences))
}

pub fn load_corpus(path: &Path, tagset: &TagSet) -> Result<Corpus> {
    parse_corpus(&read_text(path)?, tagset, &path.display().to_string())
}

pub fn load_sentences(path: &Path, tagset: &TagSet, mode: Annotation) -> Result<Vec<Sentence>> {
    parse_sentences(&read_text(path)?, tagset, mode, &path.display().to_string())
}

/// Interior tokens only; loading adds the boundaries back.
pub fn write_sentences<'a>(sentences: impl IntoIterator<Item = &'a Sentence>, tagset: &TagSet) -> String {
    let mut out = String::new();
    for (i, s) in sentences.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for t in s.interior() {
            let pos = t.pos.map(|p| tagset.name(p).to_string()).unwrap_or_else(|| MISSING.to_string());
            let state = t.state.map(|s| s.to_string()).unwrap_or_else(|| MISSING.to_string());
            let _ = writeln!(out, "{}\t{}\t{}", t.surface, pos, state);
        }
    }
    out
}

pub fn write_corpus(corpus: &Corpus) -> String {
    write_sentences(corpus.sentences(), corpus.tagset())
}
