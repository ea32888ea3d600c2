//! Scoring decoded state sequences against gold annotation.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, IngredientState, Sentence, Tag, NUM_STATES, NUM_TAGS};
use crate::decoder::{decode_with_first_layer, first_layer_tags, FirstLayerMode, Variant};
use crate::error::Error;
use crate::model::{ModelParams, TrainOptions};
use crate::Result;

/// Running counts over interior tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    /// `confusion[gold][predicted]`
    pub confusion: [[u64; NUM_STATES]; NUM_STATES],
    pub n_known: u64,
    pub n_unknown: u64,
    pub correct_known: u64,
    pub correct_unknown: u64,
}

impl Tally {
    /// Adds the interior positions of one sentence.
    pub fn add(
        &mut self,
        predicted: &[IngredientState],
        gold: &Sentence,
        vocabulary: &BTreeSet<String>,
    ) -> Result<()> {
        if predicted.len() != gold.len() {
            return Err(Error::LengthMismatch { expected: gold.len(), found: predicted.len() });
        }
        let gold_states = gold.gold_states()?;
        for p in 1..gold.len().saturating_sub(1) {
            let (g, y) = (gold_states[p].index(), predicted[p].index());
            self.confusion[g][y] += 1;
            let hit = u64::from(g == y);
            if vocabulary.contains(gold.surface(p)) {
                self.n_known += 1;
                self.correct_known += hit;
            } else {
                self.n_unknown += 1;
                self.correct_unknown += hit;
            }
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.n_known + self.n_unknown
    }

    pub fn metrics(&self) -> Metrics {
        let c = &self.confusion;
        let total = self.total();
        let correct = self.correct_known + self.correct_unknown;
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };

        let mut f1_sum = 0.0;
        let mut f1_weighted = 0.0;
        let mut present = 0usize;
        for k in 0..NUM_STATES {
            let support: u64 = c[k].iter().sum();
            if support == 0 {
                continue;
            }
            present += 1;
            let tp = c[k][k];
            let predicted: u64 = (0..NUM_STATES).map(|g| c[g][k]).sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
            f1_sum += f1;
            f1_weighted += f1 * support as f64;
        }
        Metrics {
            accuracy: ratio(correct, total),
            f1: if present == 0 { 0.0 } else { f1_sum / present as f64 },
            f1_weighted: if total == 0 { 0.0 } else { f1_weighted / total as f64 },
            accuracy_known: (self.n_known > 0).then(|| ratio(self.correct_known, self.n_known)),
            accuracy_unknown: (self.n_unknown > 0).then(|| ratio(self.correct_unknown, self.n_unknown)),
            n_known: self.n_known,
            n_unknown: self.n_unknown,
            correct_known: self.correct_known,
            correct_unknown: self.correct_unknown,
            confusion: self.confusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    /// Macro F1 over the states that occur in the gold annotation.
    pub f1: f64,
    /// F1 averaged with gold support as weights.
    pub f1_weighted: f64,
    pub accuracy_known: Option<f64>,
    pub accuracy_unknown: Option<f64>,
    pub n_known: u64,
    pub n_unknown: u64,
    pub correct_known: u64,
    pub correct_unknown: u64,
    pub confusion: [[u64; NUM_STATES]; NUM_STATES],
}

/// Metrics for one sentence's interior tokens.
pub fn score(predicted: &[IngredientState], gold: &Sentence, vocabulary: &BTreeSet<String>) -> Result<Metrics> {
    let mut tally = Tally::default();
    tally.add(predicted, gold, vocabulary)?;
    Ok(tally.metrics())
}

/// Per-tag accuracy of first-layer tags over every position, boundaries included.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagTally {
    pub correct: [u64; NUM_TAGS],
    pub total: [u64; NUM_TAGS],
}

impl TagTally {
    pub fn add(&mut self, predicted: &[Tag], gold: &Sentence) -> Result<()> {
        if predicted.len() != gold.len() {
            return Err(Error::LengthMismatch { expected: gold.len(), found: predicted.len() });
        }
        for (g, y) in gold.gold_tags()?.into_iter().zip(predicted) {
            self.total[g.index()] += 1;
            self.correct[g.index()] += u64::from(g == *y);
        }
        Ok(())
    }

    pub fn accuracy(&self) -> f64 {
        let n: u64 = self.total.iter().sum();
        if n == 0 {
            0.0
        } else {
            self.correct.iter().sum::<u64>() as f64 / n as f64
        }
    }

    pub fn tag_accuracy(&self, tag: Tag) -> Option<f64> {
        let n = self.total[tag.index()];
        (n > 0).then(|| self.correct[tag.index()] as f64 / n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PipelineOptions {
    pub train: TrainOptions,
    pub first_layer: FirstLayerMode,
}

/// Trains on `train`, decodes every sentence of `test` and scores each variant.
pub fn evaluate_split(
    train: &Corpus,
    test: &Corpus,
    variants: &[Variant],
    options: &PipelineOptions,
) -> Result<Vec<(Variant, Metrics)>> {
    let params = ModelParams::train(train, &options.train)?;
    evaluate_with(&params, test, variants, options.first_layer)
}

pub fn evaluate_with(
    params: &ModelParams,
    test: &Corpus,
    variants: &[Variant],
    first_layer: FirstLayerMode,
) -> Result<Vec<(Variant, Metrics)>> {
    let mut tallies: Vec<Tally> = variants.iter().map(|_| Tally::default()).collect();
    for sentence in test.sentences() {
        for (v, tally) in variants.iter().zip(tallies.iter_mut()) {
            let trace = decode_with_first_layer(*v, sentence, params, first_layer)?;
            tally.add(&trace.path, sentence, &params.vocabulary)?;
        }
    }
    Ok(variants.iter().copied().zip(tallies.iter().map(Tally::metrics)).collect())
}

/// First-layer tagging accuracy on `test`.
pub fn evaluate_tags(params: &ModelParams, test: &Corpus, mode: FirstLayerMode) -> Result<TagTally> {
    let mut tally = TagTally::default();
    for s in test.sentences() {
        tally.add(&first_layer_tags(s, params, mode)?, s)?;
    }
    Ok(tally)
}

/// Percentage of interior test tokens whose surface is absent from `vocabulary`.
pub fn unknown_percentage(test: &Corpus, vocabulary: &BTreeSet<String>) -> f64 {
    let (mut unknown, mut total) = (0usize, 0usize);
    for s in test.sentences() {
        for t in s.interior() {
            total += 1;
            unknown += usize::from(!vocabulary.contains(&t.surface));
        }
    }
    if total == 0 {
        0.0
    } else {
        100.0 * unknown as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub seed: u64,
    pub metrics: Vec<(Variant, Metrics)>,
    pub unknown_pct: f64,
}

/// Arithmetic means across folds.
#[derive(Debug, Clone, PartialEq)]
pub struct Averages {
    pub variant: Variant,
    pub accuracy: f64,
    pub f1: f64,
    pub f1_weighted: f64,
    /// Mean over folds that have known (resp. unknown) tokens.
    pub accuracy_known: Option<f64>,
    pub accuracy_unknown: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub folds: Vec<FoldResult>,
    pub averages: Vec<Averages>,
    pub mean_unknown_pct: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// `k` independent seeded holdout splits, each holding out `fraction` of
/// the corpus. Fold seeds are drawn from a generator seeded with `seed`.
pub fn cross_validate(
    corpus: &Corpus,
    variants: &[Variant],
    k: usize,
    fraction: f64,
    seed: u64,
    options: &PipelineOptions,
) -> Result<CrossValidation> {
    if k == 0 {
        return Err(Error::InvalidConfig("at least one fold is needed".to_string()));
    }
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let fold_seed = seeds.next_u64();
        let (train, test) = corpus.split_holdout(fraction, fold_seed)?;
        let params = ModelParams::train(&train, &options.train)?;
        let metrics = evaluate_with(&params, &test, variants, options.first_layer)?;
        let unknown_pct = unknown_percentage(&test, &params.vocabulary);
        folds.push(FoldResult { fold, seed: fold_seed, metrics, unknown_pct });
    }
    let averages = variants
        .iter()
        .enumerate()
        .map(|(i, &variant)| {
            let col = || folds.iter().map(move |f| &f.metrics[i].1);
            Averages {
                variant,
                accuracy: mean(col().map(|m| m.accuracy)).unwrap_or(0.0),
                f1: mean(col().map(|m| m.f1)).unwrap_or(0.0),
                f1_weighted: mean(col().map(|m| m.f1_weighted)).unwrap_or(0.0),
                accuracy_known: mean(col().filter_map(|m| m.accuracy_known)),
                accuracy_unknown: mean(col().filter_map(|m| m.accuracy_unknown)),
            }
        })
        .collect();
    let mean_unknown_pct = mean(folds.iter().map(|f| f.unknown_pct)).unwrap_or(0.0);
    Ok(CrossValidation { folds, averages, mean_unknown_pct })
}

/// All four variants on one seeded 80/20 split.
pub fn compare_methods(corpus: &Corpus, seed: u64, options: &PipelineOptions) -> Result<Vec<(Variant, Metrics)>> {
    let (train, test) = corpus.split_holdout(0.2, seed)?;
    evaluate_split(&train, &test, &Variant::ALL, options)
}
