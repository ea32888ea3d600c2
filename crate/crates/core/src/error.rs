use alloc::string::String;
use core::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A tagset did not have exactly 14 distinct names including the boundary tag.
    InvalidTagSet(String),
    UnknownTag(String),
    InvalidState(u32),
    EmptyCorpus,
    /// A sentence violates the boundary-padding invariant.
    Malformed(String),
    /// A token lacks a gold POS tag or ingredient state where one is required.
    Unannotated { position: usize },
    TagSetMismatch,
    InvalidFraction(f64),
    DegenerateSplit { train: usize, test: usize },
    LengthMismatch { expected: usize, found: usize },
    SentenceTooLong { len: usize, max: usize },
    InvalidConfig(String),
    PositionOutOfRange { position: usize, len: usize },
    InvalidCell,
    /// A sensitivity condition refers to a sentence the corpus does not contain.
    SentenceNotInCorpus,
    MissingPosTagger,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidTagSet(msg) => write!(f, "invalid tagset: {msg}"),
            Error::UnknownTag(name) => write!(f, "unknown POS tag `{name}`"),
            Error::InvalidState(v) => write!(f, "ingredient state {v} outside 0..=3"),
            Error::EmptyCorpus => f.write_str("corpus is empty"),
            Error::Malformed(msg) => write!(f, "malformed sentence: {msg}"),
            Error::Unannotated { position } => {
                write!(f, "token at position {position} has no gold annotation")
            }
            Error::TagSetMismatch => f.write_str("sentence does not use the corpus tagset"),
            Error::InvalidFraction(x) => write!(f, "test fraction {x} not in (0, 1)"),
            Error::DegenerateSplit { train, test } => {
                write!(f, "degenerate split: {train} train / {test} test sentences")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::SentenceTooLong { len, max } => {
                write!(f, "sentence length {len} exceeds brute-force bound {max}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::PositionOutOfRange { position, len } => {
                write!(f, "position {position} out of range for sentence of length {len}")
            }
            Error::InvalidCell => f.write_str("cell does not exist in the trace"),
            Error::SentenceNotInCorpus => f.write_str("sentence is not part of the corpus"),
            Error::MissingPosTagger => f.write_str("model has no first-layer POS tagger"),
        }
    }
}

impl core::error::Error for Error {}
