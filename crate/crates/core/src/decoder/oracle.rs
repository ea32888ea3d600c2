//! Exhaustive enumeration oracle.
//!
//! Scores every state sequence term by term, straight from the [`Scorer`],
//! without any dynamic programming. Boundary states are fixed to 0, so a
//! sentence of length `L` has `4^(L-2)` candidates.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{Scorer, Variant};
use crate::corpus::{IngredientState, Sentence, Tag, NUM_STATES, NUM_TAGS};
use crate::error::Error;
use crate::model::{LexContext, ModelParams, TransContext};
use crate::Result;

pub const DEFAULT_MAX_LEN: usize = 8;

fn tags_for(variant: Variant, sentence: &Sentence, tags: Option<&[Tag]>) -> Result<Option<Vec<Tag>>> {
    if !variant.is_double() {
        return Ok(None);
    }
    let tags = tags.ok_or_else(|| Error::InvalidConfig("double-agent scoring needs tags".into()))?;
    if tags.len() != sentence.len() {
        return Err(Error::LengthMismatch { expected: sentence.len(), found: tags.len() });
    }
    Ok(Some(tags.to_vec()))
}

/// Score of the prefix `states` (positions `0..states.len()`) under `variant`.
///
/// `last_row` overrides the row assumed at the last prefix position: the tag
/// for double-agent variants, or the virtual pre-sentence state when the
/// second-order prefix has length one. It is ignored otherwise.
pub fn partial_score<S: Scorer + ?Sized>(
    variant: Variant,
    sentence: &Sentence,
    tags: Option<&[Tag]>,
    scorer: &S,
    states: &[IngredientState],
    last_row: Option<usize>,
) -> Result<f64> {
    let tags = tags_for(variant, sentence, tags)?;
    if states.is_empty() || states.len() > sentence.len() {
        return Err(Error::LengthMismatch { expected: sentence.len(), found: states.len() });
    }
    let last = states.len() - 1;
    let outside = IngredientState::OUTSIDE;
    let row_tag = |p: usize| -> Tag {
        let tags = tags.as_ref().expect("double variants carry tags");
        match last_row {
            Some(r) if p == last => Tag::from_index(r).expect("row is a tag index"),
            _ => tags[p],
        }
    };
    let lex_ctx = |p: usize| -> LexContext {
        let s = states[p];
        match variant {
            Variant::MonoFirst => LexContext::MonoFirst { state: s },
            Variant::MonoSecond => {
                let prev = if p > 0 {
                    states[p - 1]
                } else {
                    last_row.map(IngredientState::from_index).unwrap_or(outside)
                };
                LexContext::MonoSecond { prev, state: s }
            }
            _ => LexContext::PosCond { tag: row_tag(p), state: s },
        }
    };
    let known = |p: usize| scorer.is_known(sentence.surface(p));
    let lambda = scorer.lambda_max();

    let mut acc = scorer.initial(states[0]) + scorer.lexical(0, lex_ctx(0), sentence.surface(0), known(0));
    for p in 1..=last {
        let ctx = match variant {
            Variant::MonoFirst => TransContext::First { prev: states[p - 1] },
            Variant::MonoSecond => TransContext::Second {
                prev2: if p >= 2 { states[p - 2] } else { outside },
                prev: states[p - 1],
            },
            Variant::DoubleSimple => TransContext::PosCond { tag: row_tag(p), prev: states[p - 1] },
            Variant::DoubleTransfer => TransContext::PosCond {
                tag: tags.as_ref().expect("double variants carry tags")[p - 1],
                prev: states[p - 1],
            },
        };
        acc += scorer.transition(p, ctx, states[p]);
        let lex = scorer.lexical(p, lex_ctx(p), sentence.surface(p), known(p));
        if variant.is_double() {
            acc += lambda * lex;
        } else {
            acc += lex;
        }
    }
    Ok(acc)
}

/// Score of a complete state sequence.
pub fn path_score<S: Scorer + ?Sized>(
    variant: Variant,
    sentence: &Sentence,
    tags: Option<&[Tag]>,
    scorer: &S,
    states: &[IngredientState],
) -> Result<f64> {
    if states.len() != sentence.len() {
        return Err(Error::LengthMismatch { expected: sentence.len(), found: states.len() });
    }
    partial_score(variant, sentence, tags, scorer, states, None)
}

/// Orders equal-scoring sequences by comparing from the last position back.
fn reverse_lex<T: Ord>(a: &[T], b: &[T]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

/// Advances `digits` (each `< base`) as an odometer; false once it wraps.
fn next_combination(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Best state sequence by exhaustive enumeration.
///
/// Equal scores resolve to the sequence that is smallest when compared from
/// the final position backwards, matching the decoders' lowest-index rule.
pub fn brute_force<S: Scorer + ?Sized>(
    sentence: &Sentence,
    tags: Option<&[Tag]>,
    scorer: &S,
    variant: Variant,
    max_len: usize,
) -> Result<(Vec<IngredientState>, f64)> {
    let len = sentence.len();
    if len > max_len {
        return Err(Error::SentenceTooLong { len, max: max_len });
    }
    if len < 2 {
        return Err(Error::Malformed("sentence shorter than its two boundaries".into()));
    }
    let mut digits = vec![0usize; len - 2];
    let mut best: Option<(Vec<IngredientState>, f64)> = None;
    loop {
        let mut states = vec![IngredientState::OUTSIDE; len];
        for (i, &d) in digits.iter().enumerate() {
            states[i + 1] = IngredientState::from_index(d);
        }
        let score = path_score(variant, sentence, tags, scorer, &states)?;
        let better = match &best {
            None => true,
            Some((bs, bscore)) => {
                score > *bscore || (score == *bscore && reverse_lex(&states, bs) == Ordering::Less)
            }
        };
        if better {
            best = Some((states, score));
        }
        if !next_combination(&mut digits, NUM_STATES) {
            break;
        }
    }
    Ok(best.expect("at least one sequence is enumerated"))
}

/// Score of a tag sequence under the first-layer POS HMM.
pub fn tag_path_score(sentence: &Sentence, params: &ModelParams, tags: &[Tag]) -> Result<f64> {
    let tagger = params.tagger()?;
    if tags.len() != sentence.len() {
        return Err(Error::LengthMismatch { expected: sentence.len(), found: tags.len() });
    }
    let mut acc = params.tag_initial_log_prob(tagger, tags[0])
        + params.tag_lexical_log_prob(tagger, tags[0], sentence.surface(0));
    for p in 1..tags.len() {
        acc += params.tag_transition_log_prob(tagger, tags[p - 1], tags[p]);
        acc += params.tag_lexical_log_prob(tagger, tags[p], sentence.surface(p));
    }
    Ok(acc)
}

/// Best tag sequence by enumeration; boundaries are fixed to the boundary tag.
pub fn brute_force_tags(sentence: &Sentence, params: &ModelParams, max_len: usize) -> Result<(Vec<Tag>, f64)> {
    let len = sentence.len();
    if len > max_len {
        return Err(Error::SentenceTooLong { len, max: max_len });
    }
    let boundary = params.tagset.boundary();
    let mut digits = vec![0usize; len.saturating_sub(2)];
    let mut best: Option<(Vec<Tag>, f64)> = None;
    loop {
        let mut tags = vec![boundary; len];
        for (i, &d) in digits.iter().enumerate() {
            tags[i + 1] = Tag::from_index(d).expect("digit below NUM_TAGS");
        }
        let score = tag_path_score(sentence, params, &tags)?;
        let better = match &best {
            None => true,
            Some((bt, bscore)) => score > *bscore || (score == *bscore && reverse_lex(&tags, bt) == Ordering::Less),
        };
        if better {
            best = Some((tags, score));
        }
        if !next_combination(&mut digits, NUM_TAGS) {
            break;
        }
    }
    Ok(best.expect("at least one sequence is enumerated"))
}
