//! Layered hidden Markov models for ingredient extraction.
//!
//! A first layer assigns part-of-speech tags to every token; a second layer
//! decodes a four-valued ingredient state per token. This crate holds the
//! allocation-only core: corpus model, count-based training, four Viterbi
//! decoders with full trace capture, an exhaustive brute-force oracle, the
//! sane/parasite diagnostics and the evaluation harness.
//!
//! File formats, the CLI and anything touching the filesystem live in the
//! companion `lv` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod corpus;
pub mod decoder;
pub mod diagnostics;
pub mod error;
pub mod eval;
pub mod model;
pub mod synth;

mod math;

pub use corpus::{Corpus, IngredientState, Sentence, Tag, TagSet, Token, NUM_STATES, NUM_TAGS};
pub use decoder::{DecodeTrace, FirstLayerMode, Variant};
pub use error::Error;
pub use model::{ModelParams, SmoothingConfig, TrainOptions};

pub type Result<T, E = Error> = core::result::Result<T, E>;
