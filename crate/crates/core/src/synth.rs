//! Seeded synthetic corpora.
//!
//! Three generators: small random instances for oracle checks, a recipe-like
//! corpus where the previous token's tag decides whether a noun is an
//! ingredient, and two hand-built constructions for parasite audits.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, IngredientState, Sentence, Tag, TagSet, Token, NUM_TAGS};

fn state(v: u32) -> IngredientState {
    IngredientState::new(v).expect("state literal in range")
}

/// A random training corpus plus a random sentence to decode with its
/// first-layer tags and model settings.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub corpus: Corpus,
    pub sentence: Sentence,
    pub tags: Vec<Tag>,
    pub alpha: f64,
    pub lambda_max: f64,
}

/// Random instance with at most `vocab` known words and `max_len` tokens
/// (boundaries included) in the sentence to decode.
pub fn random_instance(seed: u64, vocab: usize, max_len: usize) -> RandomInstance {
    assert!(vocab >= 1 && max_len >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tagset = TagSet::default_latin();
    let boundary = tagset.boundary();
    let n_tags = rng.gen_range(1..=NUM_TAGS);
    let mut tag_pool: Vec<Tag> = Tag::all().collect();
    tag_pool.shuffle(&mut rng);
    tag_pool.truncate(n_tags);
    let n_vocab = rng.gen_range(1..=vocab);
    let words: Vec<String> = (0..n_vocab).map(|i| format!("w{i}")).collect();

    let n_sentences = rng.gen_range(2..=8);
    let sentences = (0..n_sentences)
        .map(|_| {
            let n = rng.gen_range(1..=5);
            let toks = (0..n)
                .map(|_| {
                    let w = words.choose(&mut rng).expect("non-empty vocabulary").clone();
                    let t = *tag_pool.choose(&mut rng).expect("non-empty tag pool");
                    Token::new(w, t, state(rng.gen_range(0..4)))
                })
                .collect();
            Sentence::from_interior(toks, &tagset)
        })
        .collect();
    let corpus = Corpus::new(tagset.clone(), sentences);

    let interior = rng.gen_range(0..=max_len - 2);
    let toks: Vec<Token> = (0..interior)
        .map(|_| {
            let surface = if rng.gen_bool(0.25) {
                format!("{}{}", ["w", "u", "zz"][rng.gen_range(0..3)], rng.gen_range(100..200))
            } else {
                words.choose(&mut rng).expect("non-empty vocabulary").clone()
            };
            Token::new(surface, *tag_pool.choose(&mut rng).expect("non-empty"), state(rng.gen_range(0..4)))
        })
        .collect();
    let sentence = Sentence::from_interior(toks, &tagset);
    let mut tags: Vec<Tag> = (0..sentence.len())
        .map(|_| Tag::from_index(rng.gen_range(0..NUM_TAGS)).expect("in range"))
        .collect();
    let last = tags.len() - 1;
    tags[0] = boundary;
    tags[last] = boundary;

    let alpha = [0.0, 0.01, 0.5][rng.gen_range(0..3)];
    let lambda_max = [1.0, 2.5, 4.0][rng.gen_range(0..3)];
    RandomInstance { corpus, sentence, tags, alpha, lambda_max }
}

/// Roles in the recipe-like generator and the tags that carry them.
pub mod roles {
    pub const QUANTITY: &str = "B";
    pub const PREPOSITION: &str = "C";
    pub const NOUN: &str = "D";
    pub const ADJECTIVE: &str = "E";
    pub const VERB: &str = "F";
    pub const CONJUNCTION: &str = "H";
    pub const GENITIVE: &str = "I";
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecipeConfig {
    pub sentences: usize,
    /// Size of the noun pool; larger pools give more unknown test nouns.
    pub noun_pool: usize,
}

impl Default for RecipeConfig {
    fn default() -> Self {
        RecipeConfig { sentences: 300, noun_pool: 450 }
    }
}

fn noun_name(i: usize) -> String {
    // Two pseudo-random letters up front so prefixes carry no role signal.
    const L: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    let a = L[(i * 7 + 3) % 26] as char;
    let b = L[(i * 13 + 5) % 26] as char;
    format!("{a}{b}n{i}")
}

/// Recipe-like corpus where a noun's state is fixed by the previous tag.
///
/// Nouns follow quantities (ingredient, state 1, with an optional second
/// word in state 2), prepositions or verbs (not ingredients). Every noun is
/// drawn from the same pool in every role.
pub fn recipe_corpus(seed: u64, config: RecipeConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts = TagSet::default_latin();
    let tag = |name: &str| ts.index_of(name).expect("role tag exists");
    let pick = |rng: &mut ChaCha8Rng, xs: &[&str]| String::from(*xs.choose(rng).expect("non-empty"));
    let quantities = ["1", "2", "3", "half", "some"];
    let preps = ["of", "with", "in", "for"];
    let verbs = ["add", "mix", "cut", "boil", "pour", "stir"];
    let adjs = ["fresh", "chopped", "dry", "hot", "big", "good"];
    let noun = |rng: &mut ChaCha8Rng| noun_name(rng.gen_range(0..config.noun_pool));

    let mut sentences = Vec::with_capacity(config.sentences);
    for _ in 0..config.sentences {
        let mut toks = Vec::new();
        let clauses = rng.gen_range(1..=3);
        for c in 0..clauses {
            if c > 0 {
                toks.push(Token::new("and", tag(roles::CONJUNCTION), state(0)));
            }
            match rng.gen_range(0..3) {
                0 => {
                    toks.push(Token::new(pick(&mut rng, &quantities), tag(roles::QUANTITY), state(0)));
                    toks.push(Token::new(noun(&mut rng), tag(roles::NOUN), state(1)));
                    if rng.gen_bool(0.3) {
                        toks.push(Token::new(noun(&mut rng), tag(roles::NOUN), state(2)));
                    }
                    if rng.gen_bool(0.4) {
                        toks.push(Token::new(pick(&mut rng, &adjs), tag(roles::ADJECTIVE), state(0)));
                    }
                }
                1 => {
                    toks.push(Token::new(pick(&mut rng, &verbs), tag(roles::VERB), state(0)));
                    toks.push(Token::new(pick(&mut rng, &preps), tag(roles::PREPOSITION), state(0)));
                    toks.push(Token::new(noun(&mut rng), tag(roles::NOUN), state(0)));
                }
                _ => {
                    toks.push(Token::new(pick(&mut rng, &verbs), tag(roles::VERB), state(0)));
                    toks.push(Token::new(noun(&mut rng), tag(roles::NOUN), state(0)));
                    if rng.gen_bool(0.3) {
                        toks.push(Token::new(pick(&mut rng, &adjs), tag(roles::ADJECTIVE), state(0)));
                    }
                }
            }
        }
        sentences.push(Sentence::from_interior(toks, &ts));
    }
    Corpus::new(ts, sentences)
}

/// A parasite-audit case: training corpus, sentence and the audited position.
#[derive(Debug, Clone)]
pub struct AuditCase {
    pub corpus: Corpus,
    pub sentence: Sentence,
    pub position: usize,
    /// A sentence of the same shape, for the `add_similar` condition.
    pub similar: Sentence,
}

fn background(ts: &TagSet, copies: usize) -> Vec<Sentence> {
    let tag = |name: &str| ts.index_of(name).expect("role tag exists");
    let mut out = Vec::new();
    for i in 0..copies {
        let q = ["1", "2", "3"][i % 3];
        let n1 = ["oil", "flour", "salt", "milk"][i % 4];
        out.push(Sentence::from_interior(
            vec![
                Token::new(q, tag(roles::QUANTITY), state(0)),
                Token::new("cup", tag(roles::NOUN), state(0)),
                Token::new("of", tag(roles::PREPOSITION), state(0)),
                Token::new(n1, tag(roles::NOUN), state(1)),
            ],
            ts,
        ));
        out.push(Sentence::from_interior(
            vec![
                Token::new("add", tag(roles::VERB), state(0)),
                Token::new(n1, tag(roles::NOUN), state(1)),
                Token::new("fresh", tag(roles::ADJECTIVE), state(0)),
            ],
            ts,
        ));
    }
    out
}

/// An ingredient followed by a descriptive phrase:
/// `olive oil of quality good`, auditing the trailing adjective.
pub fn descriptive_phrase_case() -> AuditCase {
    let ts = TagSet::default_latin();
    let tag = |name: &str| ts.index_of(name).expect("role tag exists");
    let target = Sentence::from_interior(
        vec![
            Token::new("olive", tag(roles::NOUN), state(1)),
            Token::new("oil", tag(roles::NOUN), state(2)),
            Token::new("of", tag(roles::PREPOSITION), state(0)),
            Token::new("quality", tag(roles::NOUN), state(0)),
            Token::new("good", tag(roles::ADJECTIVE), state(0)),
        ],
        &ts,
    );
    let similar = Sentence::from_interior(
        vec![
            Token::new("tomato", tag(roles::NOUN), state(1)),
            Token::new("paste", tag(roles::NOUN), state(2)),
            Token::new("of", tag(roles::PREPOSITION), state(0)),
            Token::new("size", tag(roles::NOUN), state(0)),
            Token::new("big", tag(roles::ADJECTIVE), state(0)),
        ],
        &ts,
    );
    let mut sentences = background(&ts, 6);
    sentences.push(target.clone());
    AuditCase { corpus: Corpus::new(ts, sentences), position: 5, sentence: target, similar }
}

/// A trailing modifier absent from training:
/// `10 yeast dry forbread`, auditing the unknown last word.
pub fn unknown_modifier_case() -> AuditCase {
    let ts = TagSet::default_latin();
    let tag = |name: &str| ts.index_of(name).expect("role tag exists");
    let target = Sentence::from_interior(
        vec![
            Token::new("10", tag(roles::QUANTITY), state(0)),
            Token::new("yeast", tag(roles::NOUN), state(1)),
            Token::new("dry", tag(roles::ADJECTIVE), state(0)),
            Token::new("forbread", tag(roles::GENITIVE), state(0)),
        ],
        &ts,
    );
    let similar = Sentence::from_interior(
        vec![
            Token::new("2", tag(roles::QUANTITY), state(0)),
            Token::new("sugar", tag(roles::NOUN), state(1)),
            Token::new("fine", tag(roles::ADJECTIVE), state(0)),
            Token::new("forcake", tag(roles::GENITIVE), state(0)),
        ],
        &ts,
    );
    let mut sentences = background(&ts, 6);
    // Genitive nouns seen in training, none sharing the target's surface.
    sentences.push(Sentence::from_interior(
        vec![
            Token::new("add", tag(roles::VERB), state(0)),
            Token::new("flour", tag(roles::NOUN), state(1)),
            Token::new("forpizza", tag(roles::GENITIVE), state(0)),
        ],
        &ts,
    ));
    AuditCase { corpus: Corpus::new(ts, sentences), position: 4, sentence: target, similar }
}
