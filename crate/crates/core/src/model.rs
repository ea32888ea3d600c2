//! Count-based probability tables and their queries.
//!
//! Every conditional row is `(count + alpha) / (total + alpha * |support|)`.
//! Rows with no observations at all are uniform, whatever `alpha` is.
//! Lexical rows range over the training vocabulary; unknown-word rows range
//! over the inventory of observed surface prefixes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Corpus, IngredientState, Tag, TagSet, NUM_STATES, NUM_TAGS};
use crate::error::Error;
use crate::math::log_or_floor;
use crate::Result;

/// Additive smoothing and the finite replacement for `log(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    pub alpha: f64,
    pub log_floor: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig { alpha: 0.01, log_floor: -50.0 }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig("alpha must be a finite value >= 0".to_string()));
        }
        if !(self.log_floor < 0.0 && self.log_floor.is_finite()) {
            return Err(Error::InvalidConfig("log_floor must be finite and < 0".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub smoothing: SmoothingConfig,
    /// Characters of an unknown surface read by the prefix tables.
    pub prefix_len: usize,
    /// Weight on the log lexical term in the double-agent decoders.
    pub lambda_max: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { smoothing: SmoothingConfig::default(), prefix_len: 2, lambda_max: 4.0 }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        self.smoothing.validate()?;
        if self.prefix_len == 0 {
            return Err(Error::InvalidConfig("prefix_len must be >= 1".to_string()));
        }
        if !(self.lambda_max > 0.0 && self.lambda_max.is_finite()) {
            return Err(Error::InvalidConfig("lambda_max must be finite and > 0".to_string()));
        }
        Ok(())
    }
}

/// Distribution of the state at the leading boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialDist {
    pub probs: [f64; NUM_STATES],
}

/// `table[j][k] = P(state_r = k | state_{r-1} = j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransFirst {
    pub table: [[f64; NUM_STATES]; NUM_STATES],
}

/// `table[i][j][k] = P(state_r = k | state_{r-1} = j, state_{r-2} = i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransSecond {
    pub table: [[[f64; NUM_STATES]; NUM_STATES]; NUM_STATES],
}

/// `table[t][j][k] = P(state_r = k | state_{r-1} = j, tag_{r-1} = t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransPosCond {
    pub table: [[[f64; NUM_STATES]; NUM_STATES]; NUM_TAGS],
}

/// A distribution over an inventory of strings.
///
/// Members listed in `entries` carry their own probability; every other member
/// of the inventory carries `rest`. Strings outside the inventory have
/// probability zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub entries: BTreeMap<String, f64>,
    pub rest: f64,
}

impl SparseRow {
    fn probability(&self, item: &str, inventory: &BTreeSet<String>) -> f64 {
        match self.entries.get(item) {
            Some(&p) => p,
            None if inventory.contains(item) => self.rest,
            None => 0.0,
        }
    }

    /// Total mass over an inventory of `size` members.
    pub fn total(&self, size: usize) -> f64 {
        let listed: f64 = self.entries.values().sum();
        listed + self.rest * size.saturating_sub(self.entries.len()) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexVariant {
    /// `P(v | state_r)`
    MonoFirst,
    /// `P(v | state_{r-1}, state_r)`
    MonoSecond,
    /// `P(v | state_r, tag_r)`
    PosCond,
}

impl LexVariant {
    pub const ALL: [LexVariant; 3] = [LexVariant::MonoFirst, LexVariant::MonoSecond, LexVariant::PosCond];

    pub fn contexts(self) -> usize {
        match self {
            LexVariant::MonoFirst => NUM_STATES,
            LexVariant::MonoSecond => NUM_STATES * NUM_STATES,
            LexVariant::PosCond => NUM_TAGS * NUM_STATES,
        }
    }
}

/// Conditioning context of a lexical query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexContext {
    MonoFirst { state: IngredientState },
    MonoSecond { prev: IngredientState, state: IngredientState },
    PosCond { tag: Tag, state: IngredientState },
}

impl LexContext {
    pub fn variant(self) -> LexVariant {
        match self {
            LexContext::MonoFirst { .. } => LexVariant::MonoFirst,
            LexContext::MonoSecond { .. } => LexVariant::MonoSecond,
            LexContext::PosCond { .. } => LexVariant::PosCond,
        }
    }

    /// Row index inside the variant's table.
    pub fn row(self) -> usize {
        match self {
            LexContext::MonoFirst { state } => state.index(),
            LexContext::MonoSecond { prev, state } => prev.index() * NUM_STATES + state.index(),
            LexContext::PosCond { tag, state } => tag.index() * NUM_STATES + state.index(),
        }
    }

    pub fn from_row(variant: LexVariant, row: usize) -> Option<LexContext> {
        if row >= variant.contexts() {
            return None;
        }
        let state = IngredientState::from_index(row % NUM_STATES);
        let hi = row / NUM_STATES;
        Some(match variant {
            LexVariant::MonoFirst => LexContext::MonoFirst { state },
            LexVariant::MonoSecond => {
                LexContext::MonoSecond { prev: IngredientState::from_index(hi), state }
            }
            LexVariant::PosCond => LexContext::PosCond { tag: Tag::from_index(hi)?, state },
        })
    }
}

/// Conditioning context of a transition query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransContext {
    First { prev: IngredientState },
    Second { prev2: IngredientState, prev: IngredientState },
    PosCond { tag: Tag, prev: IngredientState },
}

/// Known-word emission rows for one lexical variant.
#[derive(Debug, Clone, PartialEq)]
pub struct LexicalTable {
    pub variant: LexVariant,
    pub rows: Vec<SparseRow>,
}

/// Prefix emission rows used in place of [`LexicalTable`] for unknown surfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct UnknownTable {
    pub variant: LexVariant,
    pub prefix_len: usize,
    pub rows: Vec<SparseRow>,
}

/// Plain first-order HMM over POS tags, used as the optional first layer.
#[derive(Debug, Clone, PartialEq)]
pub struct PosTagger {
    pub initial: [f64; NUM_TAGS],
    /// `trans[t][u] = P(tag_r = u | tag_{r-1} = t)`
    pub trans: [[f64; NUM_TAGS]; NUM_TAGS],
    pub lexical: Vec<SparseRow>,
    pub unknown: Vec<SparseRow>,
}

/// Every table the four decoders and the first layer read.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub tagset: TagSet,
    pub smoothing: SmoothingConfig,
    pub prefix_len: usize,
    pub lambda_max: f64,
    pub vocabulary: BTreeSet<String>,
    pub prefixes: BTreeSet<String>,
    pub pi: InitialDist,
    pub trans_first: TransFirst,
    pub trans_second: TransSecond,
    pub trans_pos: TransPosCond,
    pub lexical: [LexicalTable; 3],
    pub unknown: [UnknownTable; 3],
    pub pos_tagger: Option<PosTagger>,
}

/// First `len` characters of `surface` (the whole surface when shorter).
pub fn prefix(surface: &str, len: usize) -> &str {
    match surface.char_indices().nth(len) {
        Some((byte, _)) => &surface[..byte],
        None => surface,
    }
}

fn dense_row<const N: usize>(counts: &[u64; N], alpha: f64) -> [f64; N] {
    let total: u64 = counts.iter().sum();
    let mut out = [0.0; N];
    if total == 0 {
        out.fill(1.0 / N as f64);
        return out;
    }
    let denom = total as f64 + alpha * N as f64;
    for (o, &c) in out.iter_mut().zip(counts) {
        *o = (c as f64 + alpha) / denom;
    }
    out
}

fn sparse_row(counts: &BTreeMap<String, u64>, support: usize, alpha: f64) -> SparseRow {
    let total: u64 = counts.values().sum();
    if total == 0 {
        let rest = if support == 0 { 0.0 } else { 1.0 / support as f64 };
        return SparseRow { entries: BTreeMap::new(), rest };
    }
    let denom = total as f64 + alpha * support as f64;
    let entries = counts.iter().map(|(k, &c)| (k.clone(), (c as f64 + alpha) / denom)).collect();
    SparseRow { entries, rest: alpha / denom }
}

struct Counts {
    pi: [u64; NUM_STATES],
    first: [[u64; NUM_STATES]; NUM_STATES],
    second: [[[u64; NUM_STATES]; NUM_STATES]; NUM_STATES],
    pos: [[[u64; NUM_STATES]; NUM_STATES]; NUM_TAGS],
    lexical: [Vec<BTreeMap<String, u64>>; 3],
    unknown: [Vec<BTreeMap<String, u64>>; 3],
    tag_pi: [u64; NUM_TAGS],
    tag_trans: [[u64; NUM_TAGS]; NUM_TAGS],
    tag_lex: Vec<BTreeMap<String, u64>>,
    tag_unk: Vec<BTreeMap<String, u64>>,
}

impl Counts {
    fn new() -> Counts {
        let rows = |v: LexVariant| alloc::vec![BTreeMap::new(); v.contexts()];
        Counts {
            pi: [0; NUM_STATES],
            first: [[0; NUM_STATES]; NUM_STATES],
            second: [[[0; NUM_STATES]; NUM_STATES]; NUM_STATES],
            pos: [[[0; NUM_STATES]; NUM_STATES]; NUM_TAGS],
            lexical: LexVariant::ALL.map(rows),
            unknown: LexVariant::ALL.map(rows),
            tag_pi: [0; NUM_TAGS],
            tag_trans: [[0; NUM_TAGS]; NUM_TAGS],
            tag_lex: alloc::vec![BTreeMap::new(); NUM_TAGS],
            tag_unk: alloc::vec![BTreeMap::new(); NUM_TAGS],
        }
    }
}

fn bump(map: &mut BTreeMap<String, u64>, key: &str) {
    match map.get_mut(key) {
        Some(c) => *c += 1,
        None => {
            map.insert(key.to_string(), 1);
        }
    }
}

impl ModelParams {
    /// Estimates all tables from the annotated corpus.
    pub fn train(corpus: &Corpus, options: &TrainOptions) -> Result<ModelParams> {
        options.validate()?;
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let alpha = options.smoothing.alpha;
        let mut c = Counts::new();
        let mut vocabulary = BTreeSet::new();
        let mut prefixes = BTreeSet::new();

        for sentence in corpus.sentences() {
            let tags = sentence.gold_tags()?;
            let states = sentence.gold_states()?;
            for (p, tok) in sentence.tokens().iter().enumerate() {
                let (s, t) = (states[p], tags[p]);
                let pre = prefix(&tok.surface, options.prefix_len);
                if !vocabulary.contains(tok.surface.as_str()) {
                    vocabulary.insert(tok.surface.clone());
                }
                if !prefixes.contains(pre) {
                    prefixes.insert(pre.to_string());
                }
                // The state before the leading boundary is taken to be 0.
                let prev = if p > 0 { states[p - 1] } else { IngredientState::OUTSIDE };
                let contexts = [
                    LexContext::MonoFirst { state: s },
                    LexContext::MonoSecond { prev, state: s },
                    LexContext::PosCond { tag: t, state: s },
                ];
                for (v, ctx) in contexts.iter().enumerate() {
                    bump(&mut c.lexical[v][ctx.row()], &tok.surface);
                    bump(&mut c.unknown[v][ctx.row()], pre);
                }
                bump(&mut c.tag_lex[t.index()], &tok.surface);
                bump(&mut c.tag_unk[t.index()], pre);

                if p == 0 {
                    c.pi[s.index()] += 1;
                    c.tag_pi[t.index()] += 1;
                } else {
                    let prev2 = if p > 1 { states[p - 2] } else { IngredientState::OUTSIDE };
                    c.first[prev.index()][s.index()] += 1;
                    c.second[prev2.index()][prev.index()][s.index()] += 1;
                    c.pos[tags[p - 1].index()][prev.index()][s.index()] += 1;
                    c.tag_trans[tags[p - 1].index()][t.index()] += 1;
                }
            }
        }

        let nv = vocabulary.len();
        let np = prefixes.len();
        let lexical = [0, 1, 2].map(|v| LexicalTable {
            variant: LexVariant::ALL[v],
            rows: c.lexical[v].iter().map(|m| sparse_row(m, nv, alpha)).collect(),
        });
        let unknown = [0, 1, 2].map(|v| UnknownTable {
            variant: LexVariant::ALL[v],
            prefix_len: options.prefix_len,
            rows: c.unknown[v].iter().map(|m| sparse_row(m, np, alpha)).collect(),
        });
        let pos_tagger = PosTagger {
            initial: dense_row(&c.tag_pi, alpha),
            trans: c.tag_trans.map(|row| dense_row(&row, alpha)),
            lexical: c.tag_lex.iter().map(|m| sparse_row(m, nv, alpha)).collect(),
            unknown: c.tag_unk.iter().map(|m| sparse_row(m, np, alpha)).collect(),
        };

        Ok(ModelParams {
            tagset: corpus.tagset().clone(),
            smoothing: options.smoothing,
            prefix_len: options.prefix_len,
            lambda_max: options.lambda_max,
            vocabulary,
            prefixes,
            pi: InitialDist { probs: dense_row(&c.pi, alpha) },
            trans_first: TransFirst { table: c.first.map(|r| dense_row(&r, alpha)) },
            trans_second: TransSecond { table: c.second.map(|m| m.map(|r| dense_row(&r, alpha))) },
            trans_pos: TransPosCond { table: c.pos.map(|m| m.map(|r| dense_row(&r, alpha))) },
            lexical,
            unknown,
            pos_tagger: Some(pos_tagger),
        })
    }

    pub fn is_known(&self, surface: &str) -> bool {
        self.vocabulary.contains(surface)
    }

    pub fn prefix_of<'a>(&self, surface: &'a str) -> &'a str {
        prefix(surface, self.prefix_len)
    }

    pub fn lexical_table(&self, variant: LexVariant) -> &LexicalTable {
        &self.lexical[variant as usize]
    }

    pub fn unknown_table(&self, variant: LexVariant) -> &UnknownTable {
        &self.unknown[variant as usize]
    }

    fn floor(&self, p: f64) -> f64 {
        log_or_floor(p, self.smoothing.log_floor)
    }

    /// Raw probability behind [`ModelParams::lexical_log_prob`].
    pub fn lexical_prob(&self, ctx: LexContext, surface: &str, known: bool) -> f64 {
        let v = ctx.variant() as usize;
        if known {
            self.lexical[v].rows[ctx.row()].probability(surface, &self.vocabulary)
        } else {
            self.unknown[v].rows[ctx.row()].probability(self.prefix_of(surface), &self.prefixes)
        }
    }

    /// Log emission probability; unknown surfaces read the prefix table.
    ///
    /// Never returns `-inf`: absent entries yield the configured log floor.
    pub fn lexical_log_prob(&self, ctx: LexContext, surface: &str, known: bool) -> f64 {
        self.floor(self.lexical_prob(ctx, surface, known))
    }

    pub fn transition_prob(&self, ctx: TransContext, next: IngredientState) -> f64 {
        let k = next.index();
        match ctx {
            TransContext::First { prev } => self.trans_first.table[prev.index()][k],
            TransContext::Second { prev2, prev } => {
                self.trans_second.table[prev2.index()][prev.index()][k]
            }
            TransContext::PosCond { tag, prev } => self.trans_pos.table[tag.index()][prev.index()][k],
        }
    }

    pub fn transition_log_prob(&self, ctx: TransContext, next: IngredientState) -> f64 {
        self.floor(self.transition_prob(ctx, next))
    }

    pub fn initial_log_prob(&self, state: IngredientState) -> f64 {
        self.floor(self.pi.probs[state.index()])
    }

    pub(crate) fn tagger(&self) -> Result<&PosTagger> {
        self.pos_tagger.as_ref().ok_or(Error::MissingPosTagger)
    }

    pub(crate) fn tag_initial_log_prob(&self, tagger: &PosTagger, tag: Tag) -> f64 {
        self.floor(tagger.initial[tag.index()])
    }

    pub(crate) fn tag_transition_log_prob(&self, tagger: &PosTagger, prev: Tag, next: Tag) -> f64 {
        self.floor(tagger.trans[prev.index()][next.index()])
    }

    pub(crate) fn tag_lexical_log_prob(&self, tagger: &PosTagger, tag: Tag, surface: &str) -> f64 {
        let p = if self.is_known(surface) {
            tagger.lexical[tag.index()].probability(surface, &self.vocabulary)
        } else {
            tagger.unknown[tag.index()].probability(self.prefix_of(surface), &self.prefixes)
        };
        self.floor(p)
    }

    /// Number of stored entries per table, for reporting.
    pub fn table_sizes(&self) -> Vec<(&'static str, usize)> {
        let sparse = |rows: &[SparseRow]| rows.iter().map(|r| r.entries.len()).sum::<usize>();
        let mut out = alloc::vec![
            ("pi", NUM_STATES),
            ("trans1", NUM_STATES * NUM_STATES),
            ("trans2", NUM_STATES.pow(3)),
            ("transpos", NUM_TAGS * NUM_STATES * NUM_STATES),
            ("lex1", sparse(&self.lexical[0].rows)),
            ("lex2", sparse(&self.lexical[1].rows)),
            ("lexpos", sparse(&self.lexical[2].rows)),
            ("unk1", sparse(&self.unknown[0].rows)),
            ("unk2", sparse(&self.unknown[1].rows)),
            ("unkpos", sparse(&self.unknown[2].rows)),
            ("vocab", self.vocabulary.len()),
            ("prefixes", self.prefixes.len()),
        ];
        if let Some(t) = &self.pos_tagger {
            out.push(("postag_lex", sparse(&t.lexical)));
            out.push(("postag_unk", sparse(&t.unknown)));
        }
        out
    }

    /// Checks that every conditional row sums to one within `tol`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(alloc::format!("row of {what} not normalized")));
        let ok = |s: f64| (s - 1.0).abs() <= tol;
        if !ok(self.pi.probs.iter().sum()) {
            return bad("pi");
        }
        if !self.trans_first.table.iter().all(|r| ok(r.iter().sum())) {
            return bad("trans1");
        }
        if !self.trans_second.table.iter().flatten().all(|r| ok(r.iter().sum())) {
            return bad("trans2");
        }
        if !self.trans_pos.table.iter().flatten().all(|r| ok(r.iter().sum())) {
            return bad("transpos");
        }
        let nv = self.vocabulary.len();
        let np = self.prefixes.len();
        for t in &self.lexical {
            if !t.rows.iter().all(|r| ok(r.total(nv))) {
                return bad("lexical");
            }
        }
        for t in &self.unknown {
            if !t.rows.iter().all(|r| ok(r.total(np))) {
                return bad("unknown");
            }
        }
        if let Some(t) = &self.pos_tagger {
            if !ok(t.initial.iter().sum()) || !t.trans.iter().all(|r| ok(r.iter().sum())) {
                return bad("tagger transitions");
            }
            if !t.lexical.iter().all(|r| ok(r.total(nv))) || !t.unknown.iter().all(|r| ok(r.total(np))) {
                return bad("tagger emissions");
            }
        }
        Ok(())
    }
}
