use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lv::{csv_out, model_file, tsv};
use lv_core::synth::{descriptive_phrase_case, AuditCase};
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn lv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lv")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = lv(args);
    assert!(out.status.success(), "lv {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_corpus(dir: &TempDir) -> PathBuf {
    let text = tsv::read_text(&data("recipes.tsv")).unwrap();
    let ts = tsv::load_tagset(&data("tagset.txt")).unwrap();
    let corpus = tsv::parse_corpus(&text, &ts, "recipes").unwrap();
    let first: Vec<_> = corpus.sentences().iter().take(80).collect();
    let path = dir.path().join("small.tsv");
    std::fs::write(&path, tsv::write_sentences(first, &ts)).unwrap();
    path
}

fn write_case(dir: &TempDir, case: &AuditCase) -> (PathBuf, PathBuf) {
    let corpus = dir.path().join("case.tsv");
    let similar = dir.path().join("similar.tsv");
    std::fs::write(&corpus, tsv::write_corpus(&case.corpus)).unwrap();
    std::fs::write(&similar, tsv::write_sentences([&case.similar], case.corpus.tagset())).unwrap();
    (corpus, similar)
}

fn surfaces(case: &AuditCase) -> String {
    case.sentence.interior().iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
}

#[test]
fn train_writes_a_loadable_model_and_is_repeatable() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(&dir);
    let a = dir.path().join("a.lvm");
    let b = dir.path().join("b.lvm");
    let sizes = ok(&["train", "--corpus", s(&corpus), "--out", s(&a)]);
    assert!(sizes.contains("lex1"), "{sizes}");
    ok(&["train", "--corpus", s(&corpus), "--out", s(&b)]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let params = model_file::deserialize(&text).unwrap();
    assert_eq!(model_file::serialize(&params), text);
    let stdout = ok(&["train", "--corpus", s(&corpus)]);
    assert_eq!(stdout, text);
}

#[test]
fn missing_corpus_exits_with_usage_code() {
    let out = lv(&["train", "--corpus", "/nonexistent/corpus.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(lv(&["train"]).status.code(), Some(2));
    assert_eq!(lv(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(&dir);
    let cfg = dir.path().join("lv.toml");
    std::fs::write(&cfg, format!("corpus = \"{}\"\nvariant = \"mono1\"\n", s(&corpus))).unwrap();
    let csv = ok(&["eval", "--config", s(&cfg), "--variants", "mono1"]);
    assert!(csv.lines().nth(1).unwrap().starts_with("0,mono1,"));
    std::fs::write(&cfg, "colour = 3\n").unwrap();
    assert_eq!(lv(&["eval", "--config", s(&cfg)]).status.code(), Some(2));
}

#[test]
fn decode_emits_one_line_per_token_and_agrees_with_the_oracle() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(&dir);
    let model = dir.path().join("m.lvm");
    ok(&["train", "--corpus", s(&corpus), "--out", s(&model)]);
    let input = dir.path().join("in.tsv");
    std::fs::write(&input, "add\tF\noil\tD\n\nqqunseen\t_\t_\nzzother\tD\n").unwrap();
    for variant in ["mono1", "mono2", "double", "transfer"] {
        let out = ok(&["decode", "--model", s(&model), "--corpus", s(&input), "--variant", variant, "--oracle",
            "--first-layer", "hmm"]);
        assert_eq!(out.matches("# oracle=agree").count(), 2, "{variant}: {out}");
        let rows: Vec<&str> = out.lines().filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.split('\t').count() == 3));
    }
    let gold = lv(&["decode", "--model", s(&model), "--corpus", s(&input), "--variant", "transfer"]);
    assert_eq!(gold.status.code(), Some(2));
}

#[test]
fn decode_rejects_a_foreign_tagset() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(&dir);
    let model = dir.path().join("m.lvm");
    ok(&["train", "--corpus", s(&corpus), "--out", s(&model)]);
    let tags = dir.path().join("tags.txt");
    let mut names: Vec<String> = lv_core::TagSet::default_latin().names().to_vec();
    names.swap(0, 1);
    std::fs::write(&tags, names.join("\n")).unwrap();
    let out = lv(&["decode", "--model", s(&model), "--corpus", s(&corpus), "--tagset", s(&tags)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn xval_lists_each_fold_then_the_average() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(&dir);
    let csv = ok(&["xval", "--corpus", s(&corpus), "--folds", "3", "--variants", "mono1,transfer"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], csv_out::METRICS_HEADER.join(","));
    assert_eq!(lines.len(), 1 + 2 * 4);
    assert!(lines[4].starts_with("Avg,mono1,"));
    assert!(lines[8].starts_with("Avg,transfer,"));
}

#[test]
fn compare_has_one_row_per_variant() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(&dir);
    let csv = ok(&["compare", "--corpus", s(&corpus)]);
    let names: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["mono1", "mono2", "double", "transfer"]);
}

#[test]
fn diagnose_renders_tables_and_counts() {
    let dir = TempDir::new().unwrap();
    let case = descriptive_phrase_case();
    let (corpus, _) = write_case(&dir, &case);
    let pos = case.position.to_string();
    let simple = ok(&["diagnose", "--corpus", s(&corpus), "--sentence", &surfaces(&case), "--position", &pos,
        "--variant", "double", "--topk", "2"]);
    let transfer = ok(&["diagnose", "--corpus", s(&corpus), "--sentence", &surfaces(&case), "--position", &pos,
        "--variant", "transfer", "--topk", "2"]);
    let count = |out: &str| -> usize {
        out.lines().last().unwrap().rsplit("parasites=").next().unwrap().parse().unwrap()
    };
    assert!(simple.contains("~Tr-1=E~"), "{simple}");
    assert!(count(&transfer) < count(&simple));
    let out = lv(&["diagnose", "--corpus", s(&corpus), "--sentence", "no such words", "--position", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sensitivity_csv_has_a_report_per_condition_and_variant() {
    let dir = TempDir::new().unwrap();
    let case = descriptive_phrase_case();
    let (corpus, similar) = write_case(&dir, &case);
    let out = dir.path().join("sens.csv");
    let index = (case.corpus.len() - 1).to_string();
    ok(&["sensitivity", "--corpus", s(&corpus), "--sentence", &index, "--position", &case.position.to_string(),
        "--conditions", "base,duplicate,add_similar", "--variants", "double,transfer", "--similar", s(&similar),
        "--out", s(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    let reports = csv_out::parse_sensitivity_csv(&text, case.position).unwrap();
    assert_eq!(reports.len(), 6);
    assert!(reports.iter().all(|r| r.hypotheses.len() == 3 && r.parasite_count == r.recount()));
    assert_eq!(csv_out::sensitivity_csv(&reports).unwrap(), text);
    let missing = lv(&["sensitivity", "--corpus", s(&corpus), "--sentence", &index, "--position", "5",
        "--conditions", "add_similar"]);
    assert_eq!(missing.status.code(), Some(2));
}
