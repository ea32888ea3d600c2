//! Label alphabets and the annotated corpus model.
//!
//! Every [`Sentence`] is boundary padded: a `"."` token carrying the boundary
//! tag and state 0 sits at each end, so decoders can index the first score
//! column at the leading boundary.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::math;
use crate::Result;

/// Number of POS tags, the boundary tag included.
pub const NUM_TAGS: usize = 14;
/// Number of ingredient states.
pub const NUM_STATES: usize = 4;
/// Surface of the padding token.
pub const BOUNDARY_SURFACE: &str = ".";
/// Name of the boundary tag.
pub const BOUNDARY_TAG: &str = ".";

/// A POS tag, stored as a zero-based index into its [`TagSet`].
///
/// The one-based [`Tag::code`] is what tables and printed matrices use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(u8);

impl Tag {
    pub fn from_index(index: usize) -> Option<Tag> {
        (index < NUM_TAGS).then_some(Tag(index as u8))
    }

    /// Tag from its one-based code (1..=14).
    pub fn from_code(code: usize) -> Option<Tag> {
        code.checked_sub(1).and_then(Tag::from_index)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize + 1
    }

    pub fn all() -> impl Iterator<Item = Tag> {
        (0..NUM_TAGS as u8).map(Tag)
    }
}

/// Ingredient label of a token.
///
/// 0 is "not an ingredient", 1 a single-word ingredient or its first word,
/// 2 the second word of a multi-word ingredient, 3 any further word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IngredientState(u8);

impl IngredientState {
    pub const OUTSIDE: IngredientState = IngredientState(0);

    pub fn new(value: u32) -> Result<IngredientState> {
        if value < NUM_STATES as u32 {
            Ok(IngredientState(value as u8))
        } else {
            Err(Error::InvalidState(value))
        }
    }

    /// Panics if `index >= 4`; for internal loops over known-valid indices.
    #[inline]
    pub fn from_index(index: usize) -> IngredientState {
        assert!(index < NUM_STATES, "state index {index} out of range");
        IngredientState(index as u8)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = IngredientState> {
        (0..NUM_STATES as u8).map(IngredientState)
    }
}

impl fmt::Display for IngredientState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The fixed 14-entry POS alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSet {
    names: Vec<String>,
    boundary: Tag,
}

impl TagSet {
    /// Builds a tagset from names in code order; `"."` must be among them.
    pub fn new<I, S>(names: I) -> Result<TagSet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() != NUM_TAGS {
            return Err(Error::InvalidTagSet(alloc::format!(
                "expected {NUM_TAGS} tags, found {}",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.contains(['\t', '\n']) {
                return Err(Error::InvalidTagSet(alloc::format!("bad tag name {name:?}")));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidTagSet(alloc::format!("duplicate tag `{name}`")));
            }
        }
        let boundary = names
            .iter()
            .position(|n| n == BOUNDARY_TAG)
            .and_then(Tag::from_index)
            .ok_or_else(|| Error::InvalidTagSet("boundary tag `.` missing".to_string()))?;
        Ok(TagSet { names, boundary })
    }

    /// Tags `A`, `B`, `C`, `.`, `D` … `M`: the boundary sits at code 4.
    pub fn default_latin() -> TagSet {
        TagSet::new(["A", "B", "C", ".", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M"])
            .expect("built-in tagset is valid")
    }

    pub fn index_of(&self, name: &str) -> Option<Tag> {
        self.names.iter().position(|n| n == name).and_then(Tag::from_index)
    }

    pub fn name(&self, tag: Tag) -> &str {
        &self.names[tag.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn boundary(&self) -> Tag {
        self.boundary
    }

    /// Stable 64-bit FNV-1a fingerprint over the ordered names.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for name in &self.names {
            for &b in name.as_bytes().iter().chain(core::iter::once(&0u8)) {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

/// One token: surface plus optional gold annotations.
///
/// Training and scoring need both annotations; decoding raw input does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub pos: Option<Tag>,
    pub state: Option<IngredientState>,
}

impl Token {
    pub fn new(surface: impl Into<String>, pos: Tag, state: IngredientState) -> Token {
        Token { surface: surface.into(), pos: Some(pos), state: Some(state) }
    }

    pub fn bare(surface: impl Into<String>) -> Token {
        Token { surface: surface.into(), pos: None, state: None }
    }

    fn boundary(tagset: &TagSet) -> Token {
        Token::new(BOUNDARY_SURFACE, tagset.boundary(), IngredientState::OUTSIDE)
    }

    fn is_boundary(&self, tagset: &TagSet) -> bool {
        self.surface == BOUNDARY_SURFACE
            && self.pos == Some(tagset.boundary())
            && self.state == Some(IngredientState::OUTSIDE)
    }
}

/// A boundary-padded token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
    predicted_pos: Option<Vec<Tag>>,
}

impl Sentence {
    /// Pads `interior` with a boundary token on each side.
    pub fn from_interior(interior: Vec<Token>, tagset: &TagSet) -> Sentence {
        let mut tokens = Vec::with_capacity(interior.len() + 2);
        tokens.push(Token::boundary(tagset));
        tokens.extend(interior);
        tokens.push(Token::boundary(tagset));
        Sentence { tokens, predicted_pos: None }
    }

    /// Accepts an already padded sequence, checking both boundaries.
    pub fn from_padded(tokens: Vec<Token>, tagset: &TagSet) -> Result<Sentence> {
        let ok = tokens.len() >= 2
            && tokens[0].is_boundary(tagset)
            && tokens[tokens.len() - 1].is_boundary(tagset);
        if !ok {
            return Err(Error::Malformed("missing boundary token at an end".to_string()));
        }
        Ok(Sentence { tokens, predicted_pos: None })
    }

    /// Attaches first-layer tags; length must equal [`Sentence::len`].
    pub fn with_predicted_pos(mut self, tags: Vec<Tag>) -> Result<Sentence> {
        if tags.len() != self.tokens.len() {
            return Err(Error::LengthMismatch { expected: self.tokens.len(), found: tags.len() });
        }
        self.predicted_pos = Some(tags);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Tokens without the two boundaries.
    pub fn interior(&self) -> &[Token] {
        &self.tokens[1..self.tokens.len() - 1]
    }

    pub fn surface(&self, position: usize) -> &str {
        &self.tokens[position].surface
    }

    pub fn predicted_pos(&self) -> Option<&[Tag]> {
        self.predicted_pos.as_deref()
    }

    pub fn is_annotated(&self) -> bool {
        self.tokens.iter().all(|t| t.pos.is_some() && t.state.is_some())
    }

    pub fn gold_tags(&self) -> Result<Vec<Tag>> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| t.pos.ok_or(Error::Unannotated { position: i }))
            .collect()
    }

    pub fn gold_states(&self) -> Result<Vec<IngredientState>> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| t.state.ok_or(Error::Unannotated { position: i }))
            .collect()
    }

    /// Same surfaces and gold annotations, ignoring first-layer predictions.
    pub fn same_annotation(&self, other: &Sentence) -> bool {
        self.tokens == other.tokens
    }
}

/// Annotated sentences over one tagset, with surface occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    tagset: TagSet,
    vocabulary: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn new(tagset: TagSet, sentences: Vec<Sentence>) -> Corpus {
        let mut corpus = Corpus { sentences: Vec::new(), tagset, vocabulary: BTreeMap::new() };
        for s in sentences {
            corpus.push_unchecked(s);
        }
        corpus
    }

    pub fn empty(tagset: TagSet) -> Corpus {
        Corpus::new(tagset, Vec::new())
    }

    fn push_unchecked(&mut self, sentence: Sentence) {
        for t in sentence.tokens() {
            *self.vocabulary.entry(t.surface.clone()).or_insert(0) += 1;
        }
        self.sentences.push(sentence);
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn tagset(&self) -> &TagSet {
        &self.tagset
    }

    /// Surface → number of occurrences, boundary tokens included.
    pub fn vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.vocabulary
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn contains(&self, sentence: &Sentence) -> bool {
        self.sentences.iter().any(|s| s.same_annotation(sentence))
    }

    /// Returns a copy with `sentence` appended; duplicates are kept.
    pub fn augment(&self, sentence: Sentence) -> Result<Corpus> {
        let boundary = self.tagset.boundary();
        let toks = sentence.tokens();
        if toks.first().and_then(|t| t.pos) != Some(boundary)
            || toks.last().and_then(|t| t.pos) != Some(boundary)
        {
            return Err(Error::TagSetMismatch);
        }
        let mut out = self.clone();
        out.push_unchecked(sentence);
        Ok(out)
    }

    /// Copy keeping only sentences for which `keep` holds.
    pub fn filtered(&self, mut keep: impl FnMut(&Sentence) -> bool) -> Corpus {
        let kept = self.sentences.iter().filter(|s| keep(s)).cloned().collect();
        Corpus::new(self.tagset.clone(), kept)
    }

    /// Seeded sentence-level holdout split with `round(fraction * N)` test sentences.
    ///
    /// Both halves keep the original sentence order.
    pub fn split_holdout(&self, test_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::InvalidFraction(test_fraction));
        }
        if self.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let n = self.sentences.len();
        let n_test = math::round(test_fraction * n as f64) as usize;
        if n_test == 0 || n_test == n {
            return Err(Error::DegenerateSplit { train: n - n_test, test: n_test });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut is_test = alloc::vec![false; n];
        for &i in &order[..n_test] {
            is_test[i] = true;
        }
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for (s, t) in self.sentences.iter().zip(is_test) {
            if t {
                test.push(s.clone());
            } else {
                train.push(s.clone());
            }
        }
        Ok((Corpus::new(self.tagset.clone(), train), Corpus::new(self.tagset.clone(), test)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tok(tagset: &TagSet, s: &str, tag: &str, state: u32) -> Token {
        Token::new(s, tagset.index_of(tag).unwrap(), IngredientState::new(state).unwrap())
    }

    fn toy(n: usize) -> Corpus {
        let ts = TagSet::default_latin();
        let sentences = (0..n)
            .map(|i| {
                let w = alloc::format!("w{i}");
                Sentence::from_interior(vec![tok(&ts, &w, "A", (i % 4) as u32)], &ts)
            })
            .collect();
        Corpus::new(ts, sentences)
    }

    #[test]
    fn tagset_rejects_bad_inputs() {
        assert!(TagSet::new(["A", "B"]).is_err());
        let mut names: Vec<String> = TagSet::default_latin().names().to_vec();
        names[0] = "B".into();
        assert!(matches!(TagSet::new(names), Err(Error::InvalidTagSet(_))));
        let no_boundary: Vec<String> = (0..14).map(|i| alloc::format!("T{i}")).collect();
        assert!(TagSet::new(no_boundary).is_err());
    }

    #[test]
    fn tagset_index_is_bijection() {
        let ts = TagSet::default_latin();
        for tag in Tag::all() {
            assert_eq!(ts.index_of(ts.name(tag)), Some(tag));
        }
        assert_eq!(ts.boundary().code(), 4);
    }

    #[test]
    fn state_range() {
        assert!(IngredientState::new(3).is_ok());
        assert_eq!(IngredientState::new(5), Err(Error::InvalidState(5)));
    }

    #[test]
    fn padding_adds_two_boundaries() {
        let ts = TagSet::default_latin();
        let interior = (0..5).map(|i| tok(&ts, &alloc::format!("x{i}"), "B", 0)).collect();
        let s = Sentence::from_interior(interior, &ts);
        assert_eq!(s.len(), 7);
        assert_eq!(s.surface(0), ".");
        assert_eq!(s.surface(6), ".");
        assert!(Sentence::from_padded(s.tokens().to_vec(), &ts).is_ok());
        assert!(Sentence::from_padded(s.interior().to_vec(), &ts).is_err());
    }

    #[test]
    fn split_counts_and_determinism() {
        let c = toy(10);
        let (train, test) = c.split_holdout(0.2, 7).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        let (train2, test2) = c.split_holdout(0.2, 7).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
        for s in test.sentences() {
            assert!(!train.contains(s));
        }
        assert!(matches!(c.split_holdout(1.0, 7), Err(Error::InvalidFraction(_))));
        assert!(matches!(c.split_holdout(0.0, 7), Err(Error::InvalidFraction(_))));
    }

    #[test]
    fn augment_duplicates_and_counts() {
        let c = toy(3);
        let s = c.sentences()[0].clone();
        let c2 = c.augment(s.clone()).unwrap();
        assert_eq!(c2.sentences().iter().filter(|x| x.same_annotation(&s)).count(), 2);
        assert_eq!(c2.vocabulary()["w0"], 2);

        let ts = TagSet::default_latin();
        let empty = Corpus::empty(ts.clone());
        let novel = Sentence::from_interior(vec![tok(&ts, "new", "C", 1)], &ts);
        let one = empty.augment(novel).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.vocabulary()["new"], 1);
    }

    #[test]
    fn augment_rejects_foreign_boundary() {
        let c = toy(1);
        let other = TagSet::new(["A", ".", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "N"])
            .unwrap();
        let s = Sentence::from_interior(vec![], &other);
        assert_eq!(c.augment(s), Err(Error::TagSetMismatch));
    }
}
