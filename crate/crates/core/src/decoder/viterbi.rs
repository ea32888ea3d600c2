use alloc::vec;
use alloc::vec::Vec;

use super::trace::{Binding, DecodeTrace, Origin, ScoredTerm, StateMatrix, TermKind, Value, Variable};
use super::{admissible, combine_cell, Scorer, Variant};
use crate::corpus::{IngredientState, Sentence, Tag, NUM_STATES};
use crate::model::{LexContext, TransContext};

fn st(i: usize) -> IngredientState {
    IngredientState::from_index(i)
}

fn bind(variable: Variable, position: usize, value: Value, origin: Origin) -> Binding {
    Binding { variable, position, value, origin }
}

fn state_hyp(position: usize, k: usize) -> Binding {
    bind(Variable::State, position, Value::State(st(k)), Origin::Hypothesis)
}

fn term(kind: TermKind, position: usize, log_value: f64, weight: f64, from_prefix: bool, bindings: Vec<Binding>) -> ScoredTerm {
    ScoredTerm { kind, position, log_value, weight, from_prefix, bindings }
}

/// Max over `candidates`, keeping the first (lowest) index on ties.
fn best_of(candidates: impl Iterator<Item = (usize, f64)>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in candidates {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

struct Builder {
    matrix: StateMatrix,
    terms: Vec<Vec<ScoredTerm>>,
    rows: usize,
}

impl Builder {
    fn new(len: usize, rows: usize) -> Builder {
        Builder { matrix: StateMatrix::new(len, rows), terms: vec![Vec::new(); len * rows * NUM_STATES], rows }
    }

    fn set(&mut self, p: usize, row: usize, col: usize, delta: f64, psi: usize, terms: Vec<ScoredTerm>) {
        self.matrix.set(p, row, col, delta, psi);
        self.terms[(p * self.rows + row) * NUM_STATES + col] = terms;
    }

    fn finish(
        self,
        variant: Variant,
        path: Vec<IngredientState>,
        path_rows: Vec<usize>,
        score: f64,
        tags: Option<Vec<Tag>>,
    ) -> DecodeTrace {
        DecodeTrace { variant, matrix: self.matrix, terms: self.terms, path, path_rows, score, tags }
    }
}

fn known_flags<S: Scorer + ?Sized>(sentence: &Sentence, scorer: &S) -> Vec<bool> {
    sentence.tokens().iter().map(|t| scorer.is_known(&t.surface)).collect()
}

pub(super) fn mono_first<S: Scorer + ?Sized>(sentence: &Sentence, scorer: &S) -> DecodeTrace {
    let len = sentence.len();
    let known = known_flags(sentence, scorer);
    let mut b = Builder::new(len, 1);

    for p in 0..len {
        let v = sentence.surface(p);
        for k in 0..NUM_STATES {
            let lex = scorer.lexical(p, LexContext::MonoFirst { state: st(k) }, v, known[p]);
            let lex_term = term(TermKind::Lexical, p, lex, 1.0, !known[p], vec![state_hyp(p, k)]);
            if p == 0 {
                let init = scorer.initial(st(k));
                let init_term = term(TermKind::Initial, p, init, 1.0, false, vec![state_hyp(p, k)]);
                b.set(p, 0, k, init + lex, 0, vec![init_term, lex_term]);
                continue;
            }
            let (j, _) = best_of(admissible(p - 1, len).map(|j| {
                let t = scorer.transition(p, TransContext::First { prev: st(j) }, st(k));
                (j, b.matrix.delta(p - 1, 0, j) + t)
            }));
            let trans = scorer.transition(p, TransContext::First { prev: st(j) }, st(k));
            let delta = combine_cell(b.matrix.delta(p - 1, 0, j), trans, lex, None);
            let trans_term = term(
                TermKind::Transition,
                p,
                trans,
                1.0,
                false,
                vec![
                    state_hyp(p, k),
                    bind(Variable::PrevState, p - 1, Value::State(st(j)), Origin::ArgmaxSelected),
                ],
            );
            b.set(p, 0, k, delta, j, vec![trans_term, lex_term]);
        }
    }

    let (last, score) = best_of(admissible(len - 1, len).map(|k| (k, b.matrix.delta(len - 1, 0, k))));
    let mut path = vec![st(0); len];
    path[len - 1] = st(last);
    for p in (1..len).rev() {
        path[p - 1] = st(b.matrix.psi(p, 0, path[p].index()));
    }
    b.finish(Variant::MonoFirst, path, vec![0; len], score, None)
}

pub(super) fn mono_second<S: Scorer + ?Sized>(sentence: &Sentence, scorer: &S) -> DecodeTrace {
    let len = sentence.len();
    let known = known_flags(sentence, scorer);
    let mut b = Builder::new(len, NUM_STATES);

    for p in 0..len {
        let v = sentence.surface(p);
        for j in 0..NUM_STATES {
            for k in 0..NUM_STATES {
                let lex = scorer.lexical(p, LexContext::MonoSecond { prev: st(j), state: st(k) }, v, known[p]);
                let mut lex_bind = vec![state_hyp(p, k)];
                if p >= 1 {
                    lex_bind.push(bind(Variable::PrevState, p - 1, Value::State(st(j)), Origin::Hypothesis));
                }
                let lex_term = term(TermKind::Lexical, p, lex, 1.0, !known[p], lex_bind);
                if p == 0 {
                    // Row j stands for the state before the sentence.
                    let init = scorer.initial(st(k));
                    let init_term = term(TermKind::Initial, p, init, 1.0, false, vec![state_hyp(p, k)]);
                    b.set(p, j, k, init + lex, 0, vec![init_term, lex_term]);
                    continue;
                }
                // Before position 1 the state two back is the virtual outside state.
                let oldest = if p >= 2 { admissible(p - 2, len) } else { 0..1 };
                let ctx = |i: usize| TransContext::Second { prev2: st(i), prev: st(j) };
                let (i, _) = best_of(oldest.map(|i| {
                    (i, b.matrix.delta(p - 1, i, j) + scorer.transition(p, ctx(i), st(k)))
                }));
                let trans = scorer.transition(p, ctx(i), st(k));
                let delta = combine_cell(b.matrix.delta(p - 1, i, j), trans, lex, None);
                let mut tb = vec![
                    state_hyp(p, k),
                    bind(Variable::PrevState, p - 1, Value::State(st(j)), Origin::Hypothesis),
                ];
                if p >= 2 {
                    tb.push(bind(Variable::PrevState2, p - 2, Value::State(st(i)), Origin::ArgmaxSelected));
                }
                let trans_term = term(TermKind::Transition, p, trans, 1.0, false, tb);
                b.set(p, j, k, delta, i, vec![trans_term, lex_term]);
            }
        }
    }

    // Prefer the lowest final state, then the lowest state before it.
    let prev_range = if len >= 2 { admissible(len - 2, len) } else { 0..1 };
    let mut best = (0, 0, f64::NEG_INFINITY);
    for k in admissible(len - 1, len) {
        for j in prev_range.clone() {
            let d = b.matrix.delta(len - 1, j, k);
            if d > best.2 {
                best = (j, k, d);
            }
        }
    }
    let (j, k, score) = best;
    let mut path = vec![st(0); len];
    path[len - 1] = st(k);
    if len >= 2 {
        path[len - 2] = st(j);
    }
    for p in (2..len).rev() {
        path[p - 2] = st(b.matrix.psi(p, path[p - 1].index(), path[p].index()));
    }
    let mut rows = vec![0; len];
    for p in 1..len {
        rows[p] = path[p - 1].index();
    }
    b.finish(Variant::MonoSecond, path, rows, score, None)
}

pub(super) fn double<S: Scorer + ?Sized>(
    variant: Variant,
    sentence: &Sentence,
    tags: &[Tag],
    scorer: &S,
) -> DecodeTrace {
    debug_assert!(variant.is_double());
    let len = sentence.len();
    let known = known_flags(sentence, scorer);
    let lambda = scorer.lambda_max();
    let mut b = Builder::new(len, variant.rows());

    for p in 0..len {
        let v = sentence.surface(p);
        for t in Tag::all() {
            let tag_origin = if t == tags[p] { Origin::Structural } else { Origin::Hypothesis };
            // Tag conditioning the transition into p.
            let cond = match variant {
                Variant::DoubleSimple => t,
                _ if p > 0 => tags[p - 1],
                _ => t,
            };
            for k in 0..NUM_STATES {
                let lex = scorer.lexical(p, LexContext::PosCond { tag: t, state: st(k) }, v, known[p]);
                let lex_bind = vec![state_hyp(p, k), bind(Variable::Tag, p, Value::Tag(t), tag_origin)];
                if p == 0 {
                    let init = scorer.initial(st(k));
                    let init_term = term(TermKind::Initial, p, init, 1.0, false, vec![state_hyp(p, k)]);
                    let lex_term = term(TermKind::Lexical, p, lex, 1.0, !known[p], lex_bind);
                    b.set(p, t.index(), k, init + lex, 0, vec![init_term, lex_term]);
                    continue;
                }
                let prev_row = tags[p - 1].index();
                let ctx = |j: usize| TransContext::PosCond { tag: cond, prev: st(j) };
                let (j, _) = best_of(admissible(p - 1, len).map(|j| {
                    (j, b.matrix.delta(p - 1, prev_row, j) + scorer.transition(p, ctx(j), st(k)))
                }));
                let trans = scorer.transition(p, ctx(j), st(k));
                let delta = combine_cell(b.matrix.delta(p - 1, prev_row, j), trans, lambda * lex, None);
                let trans_term = term(
                    TermKind::Transition,
                    p,
                    trans,
                    1.0,
                    false,
                    vec![
                        state_hyp(p, k),
                        bind(Variable::PrevState, p - 1, Value::State(st(j)), Origin::ArgmaxSelected),
                        bind(Variable::PrevTag, p - 1, Value::Tag(cond), Origin::Structural),
                    ],
                );
                let lex_term = term(TermKind::Lexical, p, lex, lambda, !known[p], lex_bind);
                b.set(p, t.index(), k, delta, j, vec![trans_term, lex_term]);
            }
        }
    }

    let last_row = tags[len - 1].index();
    let (last, score) =
        best_of(admissible(len - 1, len).map(|k| (k, b.matrix.delta(len - 1, last_row, k))));
    let mut path = vec![st(0); len];
    path[len - 1] = st(last);
    for p in (1..len).rev() {
        path[p - 1] = st(b.matrix.psi(p, tags[p].index(), path[p].index()));
    }
    let rows = tags.iter().map(|t| t.index()).collect();
    b.finish(variant, path, rows, score, Some(tags.to_vec()))
}
