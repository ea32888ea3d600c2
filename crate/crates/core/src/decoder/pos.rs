//! First layer: supplies the POS tags `y(l)` the double-agent decoders read.

use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::corpus::{Sentence, Tag, NUM_TAGS};
use crate::error::Error;
use crate::model::ModelParams;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstLayerMode {
    /// Annotated tags, passed through unchanged.
    #[default]
    Gold,
    /// First-order Viterbi over the model's POS tagger.
    Hmm,
}

impl FromStr for FirstLayerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<FirstLayerMode> {
        match s {
            "gold" => Ok(FirstLayerMode::Gold),
            "hmm" => Ok(FirstLayerMode::Hmm),
            other => Err(Error::InvalidConfig(alloc::format!("unknown first-layer mode `{other}`"))),
        }
    }
}

pub fn first_layer_tags(sentence: &Sentence, params: &ModelParams, mode: FirstLayerMode) -> Result<Vec<Tag>> {
    match mode {
        FirstLayerMode::Gold => sentence.gold_tags(),
        FirstLayerMode::Hmm => tag_viterbi(sentence, params),
    }
}

/// Viterbi over tags with both boundaries pinned to the boundary tag.
fn tag_viterbi(sentence: &Sentence, params: &ModelParams) -> Result<Vec<Tag>> {
    let tagger = params.tagger()?;
    let len = sentence.len();
    if len == 0 {
        return Ok(Vec::new());
    }
    let boundary = params.tagset.boundary().index();
    let allowed = |p: usize| -> core::ops::Range<usize> {
        if p == 0 || p + 1 == len {
            boundary..boundary + 1
        } else {
            0..NUM_TAGS
        }
    };
    let tag = |i: usize| Tag::from_index(i).expect("index below NUM_TAGS");
    let mut delta = vec![[f64::NEG_INFINITY; NUM_TAGS]; len];
    let mut psi = vec![[0usize; NUM_TAGS]; len];

    for u in 0..NUM_TAGS {
        delta[0][u] = params.tag_initial_log_prob(tagger, tag(u))
            + params.tag_lexical_log_prob(tagger, tag(u), sentence.surface(0));
    }
    for p in 1..len {
        for u in 0..NUM_TAGS {
            let mut best = (0, f64::NEG_INFINITY);
            for t in allowed(p - 1) {
                let c = delta[p - 1][t] + params.tag_transition_log_prob(tagger, tag(t), tag(u));
                if c > best.1 {
                    best = (t, c);
                }
            }
            delta[p][u] = best.1 + params.tag_lexical_log_prob(tagger, tag(u), sentence.surface(p));
            psi[p][u] = best.0;
        }
    }
    let mut best = (0, f64::NEG_INFINITY);
    for u in allowed(len - 1) {
        if delta[len - 1][u] > best.1 {
            best = (u, delta[len - 1][u]);
        }
    }
    let mut out = vec![tag(0); len];
    out[len - 1] = tag(best.0);
    for p in (1..len).rev() {
        out[p - 1] = tag(psi[p][out[p].index()]);
    }
    Ok(out)
}
