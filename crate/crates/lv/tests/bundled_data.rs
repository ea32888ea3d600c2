//! The files under `data/` are generator output; set `LV_BLESS=1` to rewrite them.

use std::path::PathBuf;

use lv::tsv;
use lv_core::synth::{recipe_corpus, RecipeConfig};
use lv_core::TagSet;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn check(name: &str, expected: &str) {
    let path = data(name);
    if std::env::var_os("LV_BLESS").is_some() {
        std::fs::write(&path, expected).unwrap();
    }
    let found = std::fs::read_to_string(&path).unwrap();
    assert!(found == expected, "{} is stale; rerun with LV_BLESS=1", path.display());
}

#[test]
fn tagset_file_matches_the_default() {
    check("tagset.txt", &tsv::write_tagset(&TagSet::default_latin()));
}

#[test]
fn recipe_corpus_matches_the_generator() {
    let corpus = recipe_corpus(0, RecipeConfig::default());
    check("recipes.tsv", &tsv::write_corpus(&corpus));
}

#[test]
fn bundled_corpus_loads_back_unchanged() {
    let ts = tsv::load_tagset(&data("tagset.txt")).unwrap();
    let loaded = tsv::load_corpus(&data("recipes.tsv"), &ts).unwrap();
    let generated = recipe_corpus(0, RecipeConfig::default());
    assert_eq!(loaded.len(), generated.len());
    for (a, b) in loaded.sentences().iter().zip(generated.sentences()) {
        assert!(a.same_annotation(b));
    }
}
