//! Sane / parasite classification of the terms inside decoded cells.
//!
//! A term is a parasite when it conditions on a value the gold annotation
//! contradicts. A cell's own coordinates are assumptions, not claims, so
//! bindings of origin [`Origin::Hypothesis`] are never held against it; values
//! chosen by an argmax or fixed by the decoder's structure are.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt::Write as _;
use core::str::FromStr;

use crate::corpus::{Corpus, Sentence, TagSet};
use crate::decoder::{decode_with_first_layer, Binding, Cell, DecodeTrace, FirstLayerMode, Origin, ScoredTerm, TermKind, Value, Variant};
use crate::error::Error;
use crate::model::{ModelParams, TrainOptions};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sane,
    Parasite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermVerdict {
    pub term: ScoredTerm,
    pub verdict: Verdict,
    pub offending: Vec<Binding>,
}

fn contradicts(binding: &Binding, gold: &Sentence) -> Result<bool> {
    let tok = gold
        .tokens()
        .get(binding.position)
        .ok_or(Error::PositionOutOfRange { position: binding.position, len: gold.len() })?;
    let unann = Error::Unannotated { position: binding.position };
    Ok(match binding.value {
        Value::State(s) => tok.state.ok_or(unann)? != s,
        Value::Tag(t) => tok.pos.ok_or(unann)? != t,
    })
}

pub fn classify_term(term: &ScoredTerm, gold: &Sentence) -> Result<TermVerdict> {
    let mut offending = Vec::new();
    for b in &term.bindings {
        if b.origin != Origin::Hypothesis && contradicts(b, gold)? {
            offending.push(*b);
        }
    }
    let verdict = if offending.is_empty() { Verdict::Sane } else { Verdict::Parasite };
    Ok(TermVerdict { term: term.clone(), verdict, offending })
}

/// Verdicts for every term of one cell.
pub fn audit_cell(trace: &DecodeTrace, gold: &Sentence, cell: Cell) -> Result<Vec<TermVerdict>> {
    trace.cell_terms(cell)?.iter().map(|t| classify_term(t, gold)).collect()
}

/// Parasite verdicts across the `k` most probable cells at `position`,
/// counted once per term occurrence.
pub fn count_parasites(trace: &DecodeTrace, gold: &Sentence, position: usize, k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidConfig("top-k must be at least 1".to_string()));
    }
    let mut n = 0;
    for cell in trace.top_cells(position, k)? {
        n += audit_cell(trace, gold, cell)?.iter().filter(|v| v.verdict == Verdict::Parasite).count();
    }
    Ok(n)
}

/// Parasites whose offending bindings include a tag.
pub fn count_tag_parasites(trace: &DecodeTrace, gold: &Sentence, position: usize, k: usize) -> Result<usize> {
    let mut n = 0;
    for cell in trace.top_cells(position, k)? {
        n += audit_cell(trace, gold, cell)?
            .iter()
            .filter(|v| v.offending.iter().any(|b| matches!(b.value, Value::Tag(_))))
            .count();
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SituationEntry {
    pub binding: Binding,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SituationRow {
    pub kind: TermKind,
    /// One list of bindings per token column.
    pub columns: Vec<Vec<SituationEntry>>,
    pub verdict: Verdict,
}

/// The terms of one cell laid out against the sentence's token positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SituationsTable {
    pub cell: Cell,
    pub surfaces: Vec<String>,
    pub rows: Vec<SituationRow>,
}

impl SituationsTable {
    pub fn flagged_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == Verdict::Parasite).count()
    }

    /// Aligned UTF-8 text; flagged bindings render as `~value~`.
    pub fn render(&self, tagset: &TagSet) -> String {
        let mut grid: Vec<Vec<String>> = Vec::new();
        let mut header = vec![String::new()];
        header.extend(self.surfaces.iter().cloned());
        header.push("verdict".to_string());
        grid.push(header);
        for (i, row) in self.rows.iter().enumerate() {
            let mut line = vec![format!("case{}", i + 1)];
            for col in &row.columns {
                if col.is_empty() {
                    line.push("-".to_string());
                    continue;
                }
                let parts: Vec<String> = col
                    .iter()
                    .map(|e| {
                        let value = match e.binding.value {
                            Value::State(s) => format!("{}={}", e.binding.variable.label(), s),
                            Value::Tag(t) => format!("{}={}", e.binding.variable.label(), tagset.name(t)),
                        };
                        if e.flagged {
                            format!("~{value}~")
                        } else {
                            value
                        }
                    })
                    .collect();
                line.push(parts.join(" "));
            }
            line.push(match row.verdict {
                Verdict::Sane => "sane".to_string(),
                Verdict::Parasite => "parasite".to_string(),
            });
            grid.push(line);
        }
        let ncols = grid[0].len();
        let widths: Vec<usize> =
            (0..ncols).map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        let _ = writeln!(out, "cell position={} row={} col={}", self.cell.position, self.cell.row, self.cell.col);
        for row in &grid {
            let mut line = String::new();
            for (c, text) in row.iter().enumerate() {
                if c > 0 {
                    line.push_str("  ");
                }
                line.push_str(text);
                if c + 1 < ncols {
                    for _ in text.chars().count()..widths[c] {
                        line.push(' ');
                    }
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

pub fn build_situations_table(trace: &DecodeTrace, gold: &Sentence, cell: Cell) -> Result<SituationsTable> {
    let verdicts = audit_cell(trace, gold, cell)?;
    let surfaces: Vec<String> = gold.tokens().iter().map(|t| t.surface.clone()).collect();
    let rows = verdicts
        .into_iter()
        .map(|v| {
            let mut columns = vec![Vec::new(); surfaces.len()];
            for b in &v.term.bindings {
                columns[b.position].push(SituationEntry { binding: *b, flagged: v.offending.contains(b) });
            }
            SituationRow { kind: v.term.kind, columns, verdict: v.verdict }
        })
        .collect();
    Ok(SituationsTable { cell, surfaces, rows })
}

/// Graduated training-data condition for a sensitivity run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Base,
    /// Base plus a user-supplied sentence of similar shape.
    AddSimilar,
    /// Base plus a second copy of the target sentence.
    Duplicate,
    /// Base without any sentence containing the target token's surface.
    UnknownWord,
}

impl Condition {
    pub const ALL: [Condition; 4] =
        [Condition::Base, Condition::AddSimilar, Condition::Duplicate, Condition::UnknownWord];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Base => "base",
            Condition::AddSimilar => "add_similar",
            Condition::Duplicate => "duplicate",
            Condition::UnknownWord => "unknown_word",
        }
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Condition> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown condition `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityOptions {
    pub train: TrainOptions,
    pub first_layer: FirstLayerMode,
    /// Hypotheses reported per run (X, Y, Z for three).
    pub top_k: usize,
    pub similar: Option<Sentence>,
}

impl Default for SensitivityOptions {
    fn default() -> Self {
        SensitivityOptions {
            train: TrainOptions::default(),
            first_layer: FirstLayerMode::Gold,
            top_k: 3,
            similar: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub cell: Cell,
    pub score: f64,
    pub parasites: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub condition: Condition,
    pub variant: Variant,
    pub hypotheses: Vec<Hypothesis>,
    pub parasite_count: usize,
}

impl SensitivityReport {
    pub fn recount(&self) -> usize {
        self.hypotheses.iter().map(|h| h.parasites).sum()
    }
}

/// Training corpus for `condition`.
pub fn conditioned_corpus(
    base: &Corpus,
    target: &Sentence,
    position: usize,
    condition: Condition,
    similar: Option<&Sentence>,
) -> Result<Corpus> {
    match condition {
        Condition::Base => Ok(base.clone()),
        Condition::AddSimilar => {
            let s = similar.ok_or_else(|| {
                Error::InvalidConfig("add_similar needs a similar sentence".to_string())
            })?;
            base.augment(s.clone())
        }
        Condition::Duplicate => {
            if !base.contains(target) {
                return Err(Error::SentenceNotInCorpus);
            }
            base.augment(target.clone())
        }
        Condition::UnknownWord => {
            let surface = &target
                .tokens()
                .get(position)
                .ok_or(Error::PositionOutOfRange { position, len: target.len() })?
                .surface;
            Ok(base.filtered(|s| s.tokens().iter().all(|t| &t.surface != surface)))
        }
    }
}

/// Retrains per condition, decodes `target` with each variant and reports the
/// top hypotheses at `position` with their parasite counts.
pub fn sensitivity_report(
    base: &Corpus,
    target: &Sentence,
    position: usize,
    variants: &[Variant],
    conditions: &[Condition],
    options: &SensitivityOptions,
) -> Result<Vec<SensitivityReport>> {
    if position >= target.len() {
        return Err(Error::PositionOutOfRange { position, len: target.len() });
    }
    let mut out = Vec::new();
    for &condition in conditions {
        let corpus = conditioned_corpus(base, target, position, condition, options.similar.as_ref())?;
        let params = ModelParams::train(&corpus, &options.train)?;
        for &variant in variants {
            let trace = decode_with_first_layer(variant, target, &params, options.first_layer)?;
            out.push(report_for(&trace, target, position, condition, options.top_k)?);
        }
    }
    Ok(out)
}

pub fn report_for(
    trace: &DecodeTrace,
    gold: &Sentence,
    position: usize,
    condition: Condition,
    top_k: usize,
) -> Result<SensitivityReport> {
    let mut hypotheses = Vec::new();
    for cell in trace.top_cells(position, top_k)? {
        let parasites =
            audit_cell(trace, gold, cell)?.iter().filter(|v| v.verdict == Verdict::Parasite).count();
        hypotheses.push(Hypothesis { cell, score: trace.delta(cell), parasites });
    }
    let parasite_count = hypotheses.iter().map(|h| h.parasites).sum();
    Ok(SensitivityReport { condition, variant: trace.variant, hypotheses, parasite_count })
}
