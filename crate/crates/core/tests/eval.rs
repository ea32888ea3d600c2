use std::collections::BTreeSet;

use lv_core::decoder::Variant;
use lv_core::eval::*;
use lv_core::synth::{recipe_corpus, RecipeConfig};
use lv_core::{Corpus, IngredientState, Sentence, TagSet, Token};

fn small() -> Corpus {
    recipe_corpus(11, RecipeConfig { sentences: 120, noun_pool: 150 })
}

#[test]
fn perfect_prediction_scores_one() {
    let c = small();
    let s = &c.sentences()[0];
    let m = score(&s.gold_states().unwrap(), s, &BTreeSet::new()).unwrap();
    assert_eq!(m.accuracy, 1.0);
    assert_eq!(m.f1, 1.0);
}

#[test]
fn all_outside_prediction_on_one_ingredient_among_four() {
    let ts = TagSet::default_latin();
    let t = ts.index_of("D").unwrap();
    let words = [("a", 0), ("b", 1), ("c", 0), ("d", 0)];
    let toks = words.iter().map(|(w, s)| Token::new(*w, t, IngredientState::new(*s).unwrap())).collect();
    let gold = Sentence::from_interior(toks, &ts);
    let m = score(&vec![IngredientState::OUTSIDE; 6], &gold, &BTreeSet::new()).unwrap();
    assert_eq!(m.accuracy, 0.75);
}

#[test]
fn ten_tokens_two_unknown_one_wrong() {
    let ts = TagSet::default_latin();
    let t = ts.index_of("D").unwrap();
    let toks: Vec<Token> =
        (0..10).map(|i| Token::new(format!("x{i}"), t, IngredientState::new(i % 2).unwrap())).collect();
    let gold = Sentence::from_interior(toks, &ts);
    let vocab: BTreeSet<String> = (0..8).map(|i| format!("x{i}")).collect();
    let mut pred = gold.gold_states().unwrap();
    pred[10] = IngredientState::new(0).unwrap();
    let m = score(&pred, &gold, &vocab).unwrap();
    assert_eq!((m.n_known, m.n_unknown), (8, 2));
    assert_eq!(m.accuracy_unknown, Some(0.5));
    assert_eq!(m.accuracy_known, Some(1.0));
    assert_eq!(m.accuracy, 0.9);
}

#[test]
fn memorized_corpus_is_decoded_perfectly() {
    let c = recipe_corpus(3, RecipeConfig { sentences: 40, noun_pool: 10 });
    let r = evaluate_split(&c, &c, &[Variant::MonoFirst], &PipelineOptions::default()).unwrap();
    assert!(r[0].1.accuracy > 0.9);
    assert_eq!(r[0].1.n_unknown, 0);
}

#[test]
fn cross_validation_is_seeded_and_averages_are_means() {
    let c = small();
    let opts = PipelineOptions::default();
    let a = cross_validate(&c, &Variant::ALL, 10, 0.2, 5, &opts).unwrap();
    let b = cross_validate(&c, &Variant::ALL, 10, 0.2, 5, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.folds.len(), 10);
    let ids: BTreeSet<usize> = a.folds.iter().map(|f| f.fold).collect();
    assert_eq!(ids.len(), 10);
    for (i, avg) in a.averages.iter().enumerate() {
        let accs: Vec<f64> = a.folds.iter().map(|f| f.metrics[i].1.accuracy).collect();
        let lo = accs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = accs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo <= avg.accuracy && avg.accuracy <= hi);
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        assert!((mean - avg.accuracy).abs() < 1e-12);
    }
    for f in &a.folds {
        for (_, m) in &f.metrics {
            for x in [m.accuracy, m.f1, m.f1_weighted] {
                assert!((0.0..=1.0).contains(&x));
            }
            let total = (m.n_known + m.n_unknown) as f64;
            assert!((m.accuracy - (m.correct_known + m.correct_unknown) as f64 / total).abs() < 1e-12);
        }
    }
}

#[test]
fn comparison_has_one_row_per_variant() {
    let rows = compare_methods(&small(), 1, &PipelineOptions::default()).unwrap();
    let names: Vec<&str> = rows.iter().map(|(v, _)| v.name()).collect();
    assert_eq!(names, ["mono1", "mono2", "double", "transfer"]);
}

#[test]
fn degenerate_split_is_reported() {
    let c = recipe_corpus(1, RecipeConfig { sentences: 2, noun_pool: 5 });
    assert!(cross_validate(&c, &Variant::ALL, 2, 0.1, 0, &PipelineOptions::default()).is_err());
}
