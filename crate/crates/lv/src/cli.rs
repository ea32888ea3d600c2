use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{debug, info};

use lv_core::decoder::oracle::{brute_force, DEFAULT_MAX_LEN};
use lv_core::decoder::{decode_with_first_layer, FirstLayerMode, Variant};
use lv_core::diagnostics::{
    build_situations_table, count_parasites, sensitivity_report, Condition, SensitivityOptions,
};
use lv_core::eval::{compare_methods, cross_validate, evaluate_split, PipelineOptions};
use lv_core::{Corpus, ModelParams, Sentence, TagSet};

use crate::config::{RunConfig, Settings};
use crate::error::{LvError, Result};
use crate::{csv_out, model_file, tsv};

#[derive(Debug, Parser)]
#[command(name = "lv", version, about = "Layered HMM ingredient tagger")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct Common {
    /// TOML file with default settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Annotated corpus TSV (decode: the sentences to decode).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Tagset file, one tag per line; the bundled Latin tagset when absent.
    #[arg(long)]
    pub tagset: Option<PathBuf>,
    /// mono1, mono2, double or transfer.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long = "lambda")]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub log_floor: Option<f64>,
    #[arg(long)]
    pub prefix_len: Option<usize>,
    /// gold or hmm.
    #[arg(long)]
    pub first_layer: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub topk: Option<usize>,
}

impl Common {
    fn settings(&self, extra: RunConfig) -> Result<Settings> {
        let file = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            corpus: self.corpus.clone(),
            tagset: self.tagset.clone(),
            variant: self.variant.clone(),
            lambda_max: self.lambda_max,
            alpha: self.alpha,
            log_floor: self.log_floor,
            prefix_len: self.prefix_len,
            first_layer: self.first_layer.clone(),
            seed: self.seed,
            out: self.out.clone(),
            topk: self.topk,
            ..extra
        };
        file.overlay(flags).resolve()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a model and write it to --out.
    Train {
        #[command(flatten)]
        common: Common,
    },
    /// Decode sentences with a trained model.
    Decode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        /// Cross-check every path against exhaustive search (sentences up to 8 tokens).
        #[arg(long)]
        oracle: bool,
    },
    /// One seeded holdout split, metrics CSV.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<Variant>>,
        #[arg(long)]
        test_fraction: Option<f64>,
    },
    /// Repeated seeded holdouts with an Avg row per variant.
    Xval {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<Variant>>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        test_fraction: Option<f64>,
    },
    /// All four variants on one 80/20 split.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Situations tables for the top cells at one position.
    Diagnose {
        #[command(flatten)]
        common: Common,
        /// Sentence index in the corpus, or its interior surfaces joined by spaces.
        #[arg(long)]
        sentence: String,
        /// Token position, counting the leading boundary as 0.
        #[arg(long)]
        position: usize,
    },
    /// Hypothesis scores and parasite counts under graduated training conditions.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sentence: String,
        #[arg(long)]
        position: usize,
        #[arg(long, value_delimiter = ',')]
        conditions: Option<Vec<Condition>>,
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<Variant>>,
        /// TSV holding the sentence added by the add_similar condition.
        #[arg(long)]
        similar: Option<PathBuf>,
    },
}

fn tagset(settings: &Settings) -> Result<TagSet> {
    match &settings.tagset {
        Some(p) => tsv::load_tagset(p),
        None => Ok(TagSet::default_latin()),
    }
}

fn corpus(settings: &Settings) -> Result<Corpus> {
    let ts = tagset(settings)?;
    let path = settings.corpus_path()?;
    let c = tsv::load_corpus(path, &ts)?;
    info!("loaded {} sentences from {}", c.len(), path.display());
    Ok(c)
}

fn emit(settings: &Settings, text: &str) -> Result<()> {
    match &settings.out {
        Some(p) => std::fs::write(p, text).map_err(|e| LvError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pipeline(settings: &Settings) -> PipelineOptions {
    PipelineOptions { train: settings.train, first_layer: settings.first_layer }
}

/// Resolves a sentence selector against `corpus`.
pub fn select_sentence(corpus: &Corpus, selector: &str) -> Result<Sentence> {
    if let Ok(i) = selector.parse::<usize>() {
        return corpus
            .sentences()
            .get(i)
            .cloned()
            .ok_or_else(|| LvError::Usage(format!("corpus has no sentence {i}")));
    }
    let words: Vec<&str> = selector.split_whitespace().collect();
    corpus
        .sentences()
        .iter()
        .find(|s| s.interior().iter().map(|t| t.surface.as_str()).eq(words.iter().copied()))
        .cloned()
        .ok_or_else(|| LvError::Usage(format!("no sentence matches `{selector}`")))
}

fn train(common: &Common) -> Result<()> {
    let settings = common.settings(RunConfig::default())?;
    let c = corpus(&settings)?;
    let params = ModelParams::train(&c, &settings.train)?;
    let text = model_file::serialize(&params);
    let mut sizes = String::new();
    for (name, n) in params.table_sizes() {
        let _ = writeln!(sizes, "{name}\t{n}");
    }
    match &settings.out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| LvError::io(p, e))?;
            print!("{sizes}");
        }
        None => {
            print!("{text}");
            eprint!("{sizes}");
        }
    }
    Ok(())
}

fn decode_cmd(common: &Common, model: &Path, oracle: bool) -> Result<()> {
    let settings = common.settings(RunConfig::default())?;
    let mut params = model_file::deserialize(&tsv::read_text(model)?)?;
    if let Some(p) = &settings.tagset {
        model_file::check_tagset(&params, &tsv::load_tagset(p)?)?;
    }
    if let Some(l) = common.lambda_max {
        params.lambda_max = l;
    }
    let input = settings.corpus_path()?;
    let sentences = tsv::load_sentences(input, &params.tagset, tsv::Annotation::Optional)?;
    let variant = settings.variant;
    let mut out = String::new();
    for (i, s) in sentences.iter().enumerate() {
        if variant.is_double() && settings.first_layer == FirstLayerMode::Gold && s.gold_tags().is_err() {
            return Err(LvError::Usage(format!("sentence {i} lacks POS tags; decode it with --first-layer hmm")));
        }
        let trace = decode_with_first_layer(variant, s, &params, settings.first_layer)?;
        let tags = trace.tags.as_deref();
        let _ = writeln!(out, "# sentence {i} variant={variant}");
        if oracle {
            if s.len() > DEFAULT_MAX_LEN {
                let _ = writeln!(out, "# oracle=skipped length={}", s.len());
            } else {
                let (best, _) = brute_force(s, tags, &params, variant, DEFAULT_MAX_LEN)?;
                if best != trace.path {
                    let show = |p: &[lv_core::IngredientState]| {
                        p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                    };
                    return Err(LvError::OracleMismatch { sentence: i, decoder: show(&trace.path), oracle: show(&best) });
                }
                let _ = writeln!(out, "# oracle=agree");
            }
        }
        for (tok, predicted) in s.tokens().iter().zip(&trace.path).skip(1).take(s.len() - 2) {
            let gold = tok.state.map(|g| g.to_string()).unwrap_or_else(|| tsv::MISSING.to_string());
            let _ = writeln!(out, "{}\t{gold}\t{predicted}", tok.surface);
        }
        let _ = writeln!(out, "# score={}", trace.score);
        out.push('\n');
    }
    debug!("decoded {} sentences", sentences.len());
    emit(&settings, &out)
}

fn variants_or_all(v: &Option<Vec<Variant>>) -> Vec<Variant> {
    v.clone().unwrap_or_else(|| Variant::ALL.to_vec())
}

fn eval_cmd(common: &Common, variants: &Option<Vec<Variant>>, test_fraction: Option<f64>) -> Result<()> {
    let settings = common.settings(RunConfig { test_fraction, ..RunConfig::default() })?;
    let c = corpus(&settings)?;
    let (train, test) = c.split_holdout(settings.test_fraction, settings.seed)?;
    let rows = evaluate_split(&train, &test, &variants_or_all(variants), &pipeline(&settings))?;
    emit(&settings, &csv_out::metrics_csv(&rows)?)
}

fn xval_cmd(
    common: &Common,
    variants: &Option<Vec<Variant>>,
    folds: Option<usize>,
    test_fraction: Option<f64>,
) -> Result<()> {
    let settings = common.settings(RunConfig { folds, test_fraction, ..RunConfig::default() })?;
    let c = corpus(&settings)?;
    let cv = cross_validate(
        &c,
        &variants_or_all(variants),
        settings.folds,
        settings.test_fraction,
        settings.seed,
        &pipeline(&settings),
    )?;
    info!("mean unknown-word share {:.2}%", cv.mean_unknown_pct);
    emit(&settings, &csv_out::xval_csv(&cv)?)
}

fn compare_cmd(common: &Common) -> Result<()> {
    let settings = common.settings(RunConfig::default())?;
    let c = corpus(&settings)?;
    let rows = compare_methods(&c, settings.seed, &pipeline(&settings))?;
    emit(&settings, &csv_out::comparison_csv(&rows)?)
}

fn diagnose_cmd(common: &Common, selector: &str, position: usize) -> Result<()> {
    let settings = common.settings(RunConfig::default())?;
    let c = corpus(&settings)?;
    let target = select_sentence(&c, selector)?;
    let params = ModelParams::train(&c, &settings.train)?;
    let trace = decode_with_first_layer(settings.variant, &target, &params, settings.first_layer)?;
    let mut out = String::new();
    for cell in trace.top_cells(position, settings.topk)? {
        let table = build_situations_table(&trace, &target, cell)?;
        let _ = writeln!(out, "delta={:.6} flagged_rows={}", trace.delta(cell), table.flagged_rows());
        out.push_str(&table.render(c.tagset()));
        out.push('\n');
    }
    let p = count_parasites(&trace, &target, position, settings.topk)?;
    let _ = writeln!(out, "variant={} position={position} topk={} parasites={p}", settings.variant, settings.topk);
    emit(&settings, &out)
}

fn sensitivity_cmd(
    common: &Common,
    selector: &str,
    position: usize,
    conditions: &Option<Vec<Condition>>,
    variants: &Option<Vec<Variant>>,
    similar: &Option<PathBuf>,
) -> Result<()> {
    let settings = common.settings(RunConfig::default())?;
    let c = corpus(&settings)?;
    let target = select_sentence(&c, selector)?;
    let similar = match similar {
        Some(p) => {
            let mut s = tsv::load_sentences(p, c.tagset(), tsv::Annotation::Required)?;
            if s.len() != 1 {
                return Err(LvError::Usage(format!("{} must hold exactly one sentence", p.display())));
            }
            s.pop()
        }
        None => None,
    };
    let conditions = conditions.clone().unwrap_or_else(|| {
        Condition::ALL.into_iter().filter(|c| *c != Condition::AddSimilar || similar.is_some()).collect()
    });
    if conditions.contains(&Condition::AddSimilar) && similar.is_none() {
        return Err(LvError::Usage("add_similar needs --similar".to_string()));
    }
    let options = SensitivityOptions {
        train: settings.train,
        first_layer: settings.first_layer,
        top_k: settings.topk,
        similar,
    };
    let reports = sensitivity_report(&c, &target, position, &variants_or_all(variants), &conditions, &options)?;
    emit(&settings, &csv_out::sensitivity_csv(&reports)?)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train { common } => train(common),
        Command::Decode { common, model, oracle } => decode_cmd(common, model, *oracle),
        Command::Eval { common, variants, test_fraction } => eval_cmd(common, variants, *test_fraction),
        Command::Xval { common, variants, folds, test_fraction } => {
            xval_cmd(common, variants, *folds, *test_fraction)
        }
        Command::Compare { common } => compare_cmd(common),
        Command::Diagnose { common, sentence, position } => diagnose_cmd(common, sentence, *position),
        Command::Sensitivity { common, sentence, position, conditions, variants, similar } => {
            sensitivity_cmd(common, sentence, *position, conditions, variants, similar)
        }
    }
}
