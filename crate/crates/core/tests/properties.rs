use std::collections::BTreeMap;

use lv_core::decoder::oracle::brute_force;
use lv_core::decoder::{decode, Variant};
use lv_core::model::{LexContext, LexVariant, SmoothingConfig, TransContext};
use lv_core::synth::random_instance;
use lv_core::{Corpus, IngredientState, ModelParams, Tag, TrainOptions, NUM_STATES, NUM_TAGS};
use proptest::prelude::*;

fn opts(alpha: f64) -> TrainOptions {
    TrainOptions { smoothing: SmoothingConfig { alpha, log_floor: -50.0 }, ..TrainOptions::default() }
}

fn st(i: usize) -> IngredientState {
    IngredientState::from_index(i)
}

fn row_sums(params: &ModelParams) -> Vec<f64> {
    let mut sums = vec![params.pi.probs.iter().sum::<f64>()];
    sums.extend(params.trans_first.table.iter().map(|r| r.iter().sum::<f64>()));
    sums.extend(params.trans_second.table.iter().flatten().map(|r| r.iter().sum::<f64>()));
    sums.extend(params.trans_pos.table.iter().flatten().map(|r| r.iter().sum::<f64>()));
    for v in LexVariant::ALL {
        for row in 0..v.contexts() {
            let ctx = LexContext::from_row(v, row).unwrap();
            let known: f64 = params.vocabulary.iter().map(|w| params.lexical_prob(ctx, w, true)).sum();
            let unknown: f64 = params.prefixes.iter().map(|p| params.lexical_prob(ctx, p, false)).sum();
            sums.push(known);
            sums.push(unknown);
        }
    }
    sums
}

/// Transition and emission counts recomputed straight from the corpus.
#[derive(Default)]
struct Recount {
    first: BTreeMap<(usize, usize), u64>,
    pos: BTreeMap<(usize, usize, usize), u64>,
    lex1: BTreeMap<(usize, String), u64>,
    lexpos: BTreeMap<(usize, usize, String), u64>,
}

fn recount(corpus: &Corpus) -> Recount {
    let mut r = Recount::default();
    for s in corpus.sentences() {
        let tags = s.gold_tags().unwrap();
        let states = s.gold_states().unwrap();
        for p in 0..s.len() {
            let k = states[p].index();
            *r.lex1.entry((k, s.surface(p).to_string())).or_default() += 1;
            *r.lexpos.entry((tags[p].index(), k, s.surface(p).to_string())).or_default() += 1;
            if p > 0 {
                *r.first.entry((states[p - 1].index(), k)).or_default() += 1;
                *r.pos.entry((tags[p - 1].index(), states[p - 1].index(), k)).or_default() += 1;
            }
        }
    }
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rows_sum_to_one(seed in any::<u64>(), alpha in prop::sample::select(vec![0.0, 0.01, 1.0])) {
        let inst = random_instance(seed, 12, 6);
        let params = ModelParams::train(&inst.corpus, &opts(alpha)).unwrap();
        for s in row_sums(&params) {
            prop_assert!((s - 1.0).abs() <= 1e-9, "row sum {}", s);
        }
    }

    #[test]
    fn unsmoothed_entries_equal_relative_counts(seed in any::<u64>()) {
        let inst = random_instance(seed, 12, 6);
        let params = ModelParams::train(&inst.corpus, &opts(0.0)).unwrap();
        let r = recount(&inst.corpus);
        for j in 0..NUM_STATES {
            let total: u64 = (0..NUM_STATES).map(|k| r.first.get(&(j, k)).copied().unwrap_or(0)).sum();
            if total == 0 { continue; }
            for k in 0..NUM_STATES {
                let c = r.first.get(&(j, k)).copied().unwrap_or(0);
                let expect = c as f64 / total as f64;
                prop_assert_eq!(params.transition_prob(TransContext::First { prev: st(j) }, st(k)), expect);
            }
        }
        for t in 0..NUM_TAGS {
            for j in 0..NUM_STATES {
                let total: u64 = (0..NUM_STATES).map(|k| r.pos.get(&(t, j, k)).copied().unwrap_or(0)).sum();
                if total == 0 { continue; }
                for k in 0..NUM_STATES {
                    let c = r.pos.get(&(t, j, k)).copied().unwrap_or(0);
                    let ctx = TransContext::PosCond { tag: Tag::from_index(t).unwrap(), prev: st(j) };
                    prop_assert_eq!(params.transition_prob(ctx, st(k)), c as f64 / total as f64);
                }
            }
        }
        for k in 0..NUM_STATES {
            let total: u64 = r.lex1.iter().filter(|((s, _), _)| *s == k).map(|(_, c)| *c).sum();
            if total == 0 { continue; }
            for w in &params.vocabulary {
                let c = r.lex1.get(&(k, w.clone())).copied().unwrap_or(0);
                let got = params.lexical_prob(LexContext::MonoFirst { state: st(k) }, w, true);
                prop_assert_eq!(got, c as f64 / total as f64);
            }
        }
        for ((t, k, w), c) in &r.lexpos {
            let total: u64 = r.lexpos.iter().filter(|((a, b, _), _)| a == t && b == k).map(|(_, c)| *c).sum();
            let ctx = LexContext::PosCond { tag: Tag::from_index(*t).unwrap(), state: st(*k) };
            prop_assert_eq!(params.lexical_prob(ctx, w, true), *c as f64 / total as f64);
        }
    }

    #[test]
    fn unknown_emissions_depend_only_on_prefix(seed in any::<u64>(), tail_a in "[a-z]{0,4}", tail_b in "[a-z]{0,4}") {
        let inst = random_instance(seed, 12, 6);
        let params = ModelParams::train(&inst.corpus, &opts(0.01)).unwrap();
        let a = format!("w1{tail_a}");
        let b = format!("w1{tail_b}");
        for v in LexVariant::ALL {
            for row in 0..v.contexts() {
                let ctx = LexContext::from_row(v, row).unwrap();
                prop_assert_eq!(params.lexical_log_prob(ctx, &a, false), params.lexical_log_prob(ctx, &b, false));
            }
        }
    }

    #[test]
    fn holdout_partitions_the_corpus(seed in any::<u64>(), n in 2usize..40, fraction in 0.05f64..0.95) {
        let inst = random_instance(seed, 6, 4);
        let base = &inst.corpus.sentences()[0];
        let sentences: Vec<_> = (0..n).map(|_| base.clone()).collect();
        let numbered: Vec<_> = sentences
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let mut toks = s.interior().to_vec();
                toks[0].surface = format!("id{i}");
                lv_core::Sentence::from_interior(toks, inst.corpus.tagset())
            })
            .collect();
        let corpus = Corpus::new(inst.corpus.tagset().clone(), numbered);
        match corpus.split_holdout(fraction, seed) {
            Ok((train, test)) => {
                prop_assert_eq!(train.len() + test.len(), n);
                prop_assert!(!train.is_empty() && !test.is_empty());
                let ids = |c: &Corpus| -> Vec<usize> {
                    c.sentences().iter().map(|s| s.surface(1)[2..].parse().unwrap()).collect()
                };
                let (a, b) = (ids(&train), ids(&test));
                prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(b.windows(2).all(|w| w[0] < w[1]));
                let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
                let again = corpus.split_holdout(fraction, seed).unwrap();
                prop_assert_eq!(ids(&again.0), a);
            }
            Err(lv_core::Error::DegenerateSplit { .. }) => {
                let t = (fraction * n as f64).round() as usize;
                prop_assert!(t == 0 || t == n);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn decoders_agree_with_enumeration(seed in any::<u64>()) {
        let inst = random_instance(seed, 12, 6);
        let params = ModelParams::train(&inst.corpus, &TrainOptions {
            lambda_max: inst.lambda_max,
            ..opts(inst.alpha)
        }).unwrap();
        for v in Variant::ALL {
            let tags = v.is_double().then_some(inst.tags.as_slice());
            let trace = decode(v, &inst.sentence, tags, &params).unwrap();
            let (best, _) = brute_force(&inst.sentence, tags, &params, v, 8).unwrap();
            prop_assert_eq!(&trace.path, &best);
        }
    }
}
