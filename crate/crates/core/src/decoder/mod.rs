//! Log-space Viterbi decoders over ingredient states.
//!
//! Positions run `0..len` with the boundary tokens at both ends. Boundary
//! positions only admit state 0, so a path is fixed at its ends and free on
//! the interior. Every max resolves ties to the lowest index, which makes the
//! decoded path the optimum that is smallest when compared from the last
//! position backwards.
//!
//! | variant          | rows          | transition context           | lexical context     |
//! |------------------|---------------|------------------------------|---------------------|
//! | `MonoFirst`      | 1             | Γ_{r-1}                      | Γ_r                 |
//! | `MonoSecond`     | Γ_{r-1}       | Γ_{r-2}, Γ_{r-1}             | Γ_{r-1}, Γ_r        |
//! | `DoubleSimple`   | T_r           | Γ_{r-1}, T_{r-1} := y(r)     | Γ_r, T_r (× λ)      |
//! | `DoubleTransfer` | T_r           | Γ_{r-1}, T_{r-1} := y(r-1)   | Γ_r, T_r (× λ)      |
//!
//! The simple double agent reads the transition table with the current
//! token's tag standing in for the previous one; the transfer variant reads it
//! with the previous token's first-layer tag.

use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::corpus::{IngredientState, Sentence, Tag};
use crate::error::Error;
use crate::model::{LexContext, ModelParams, TransContext};
use crate::Result;

pub mod oracle;
pub mod pos;
pub mod trace;
mod viterbi;

pub use pos::{first_layer_tags, FirstLayerMode};
pub use trace::{Binding, Cell, DecodeTrace, Origin, ScoredTerm, StateMatrix, TermKind, Value, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    MonoFirst,
    MonoSecond,
    DoubleSimple,
    DoubleTransfer,
}

impl Variant {
    pub const ALL: [Variant; 4] =
        [Variant::MonoFirst, Variant::MonoSecond, Variant::DoubleSimple, Variant::DoubleTransfer];

    pub fn name(self) -> &'static str {
        match self {
            Variant::MonoFirst => "mono1",
            Variant::MonoSecond => "mono2",
            Variant::DoubleSimple => "double",
            Variant::DoubleTransfer => "transfer",
        }
    }

    /// Whether the variant consumes first-layer tags.
    pub fn is_double(self) -> bool {
        matches!(self, Variant::DoubleSimple | Variant::DoubleTransfer)
    }

    pub fn rows(self) -> usize {
        match self {
            Variant::MonoFirst => 1,
            Variant::MonoSecond => crate::NUM_STATES,
            Variant::DoubleSimple | Variant::DoubleTransfer => crate::NUM_TAGS,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown variant `{s}`")))
    }
}

/// The log-probability source a decoder reads.
///
/// [`ModelParams`] is the production implementation; the `position` arguments
/// let test doubles perturb individual positions.
pub trait Scorer {
    fn lambda_max(&self) -> f64;
    fn is_known(&self, surface: &str) -> bool;
    fn initial(&self, state: IngredientState) -> f64;
    fn transition(&self, position: usize, ctx: TransContext, next: IngredientState) -> f64;
    fn lexical(&self, position: usize, ctx: LexContext, surface: &str, known: bool) -> f64;
}

impl Scorer for ModelParams {
    fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    fn is_known(&self, surface: &str) -> bool {
        ModelParams::is_known(self, surface)
    }

    fn initial(&self, state: IngredientState) -> f64 {
        self.initial_log_prob(state)
    }

    fn transition(&self, _position: usize, ctx: TransContext, next: IngredientState) -> f64 {
        self.transition_log_prob(ctx, next)
    }

    fn lexical(&self, _position: usize, ctx: LexContext, surface: &str, known: bool) -> f64 {
        self.lexical_log_prob(ctx, surface, known)
    }
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn lambda_max(&self) -> f64 {
        (**self).lambda_max()
    }
    fn is_known(&self, surface: &str) -> bool {
        (**self).is_known(surface)
    }
    fn initial(&self, state: IngredientState) -> f64 {
        (**self).initial(state)
    }
    fn transition(&self, position: usize, ctx: TransContext, next: IngredientState) -> f64 {
        (**self).transition(position, ctx, next)
    }
    fn lexical(&self, position: usize, ctx: LexContext, surface: &str, known: bool) -> f64 {
        (**self).lexical(position, ctx, surface, known)
    }
}

/// Sum of one cell's components: `((prev_best + transition) + lexical) + extra`.
///
/// `lexical` is taken as already weighted. `extra_transition` is the
/// successor transition added when a cell is scored as a backpointer
/// candidate for the next position.
#[inline]
pub fn combine_cell(prev_best: f64, transition: f64, lexical: f64, extra_transition: Option<f64>) -> f64 {
    let s = prev_best + transition + lexical;
    match extra_transition {
        Some(x) => s + x,
        None => s,
    }
}

/// States a path may take at `position` in a sentence of length `len`.
#[inline]
pub(crate) fn admissible(position: usize, len: usize) -> core::ops::Range<usize> {
    if position == 0 || position + 1 == len {
        0..1
    } else {
        0..crate::NUM_STATES
    }
}

fn check_tags(sentence: &Sentence, tags: &[Tag]) -> Result<()> {
    if tags.len() != sentence.len() {
        return Err(Error::LengthMismatch { expected: sentence.len(), found: tags.len() });
    }
    Ok(())
}

fn check_len(sentence: &Sentence) -> Result<()> {
    if sentence.len() < 2 {
        return Err(Error::Malformed("sentence shorter than its two boundaries".to_string()));
    }
    Ok(())
}

pub fn decode_mono_first<S: Scorer + ?Sized>(sentence: &Sentence, scorer: &S) -> Result<DecodeTrace> {
    check_len(sentence)?;
    Ok(viterbi::mono_first(sentence, scorer))
}

pub fn decode_mono_second<S: Scorer + ?Sized>(sentence: &Sentence, scorer: &S) -> Result<DecodeTrace> {
    check_len(sentence)?;
    Ok(viterbi::mono_second(sentence, scorer))
}

pub fn decode_double_simple<S: Scorer + ?Sized>(
    sentence: &Sentence,
    tags: &[Tag],
    scorer: &S,
) -> Result<DecodeTrace> {
    check_len(sentence)?;
    check_tags(sentence, tags)?;
    Ok(viterbi::double(Variant::DoubleSimple, sentence, tags, scorer))
}

pub fn decode_double_transfer<S: Scorer + ?Sized>(
    sentence: &Sentence,
    tags: &[Tag],
    scorer: &S,
) -> Result<DecodeTrace> {
    check_len(sentence)?;
    check_tags(sentence, tags)?;
    Ok(viterbi::double(Variant::DoubleTransfer, sentence, tags, scorer))
}

/// Dispatches on `variant`; double-agent variants need `tags`.
pub fn decode<S: Scorer + ?Sized>(
    variant: Variant,
    sentence: &Sentence,
    tags: Option<&[Tag]>,
    scorer: &S,
) -> Result<DecodeTrace> {
    match variant {
        Variant::MonoFirst => decode_mono_first(sentence, scorer),
        Variant::MonoSecond => decode_mono_second(sentence, scorer),
        Variant::DoubleSimple | Variant::DoubleTransfer => {
            let tags = tags.ok_or_else(|| {
                Error::InvalidConfig("double-agent decoding needs first-layer tags".to_string())
            })?;
            if variant == Variant::DoubleSimple {
                decode_double_simple(sentence, tags, scorer)
            } else {
                decode_double_transfer(sentence, tags, scorer)
            }
        }
    }
}

/// Runs the first layer (when the variant needs it) and decodes.
pub fn decode_with_first_layer(
    variant: Variant,
    sentence: &Sentence,
    params: &ModelParams,
    mode: FirstLayerMode,
) -> Result<DecodeTrace> {
    let tags: Option<Vec<Tag>> =
        if variant.is_double() { Some(first_layer_tags(sentence, params, mode)?) } else { None };
    decode(variant, sentence, tags.as_deref(), params)
}
