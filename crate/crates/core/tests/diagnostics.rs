use lv_core::decoder::{
    decode_with_first_layer, Binding, Cell, FirstLayerMode, Origin, ScoredTerm, TermKind, Value, Variable,
    Variant,
};
use lv_core::diagnostics::*;
use lv_core::synth::{descriptive_phrase_case, unknown_modifier_case};
use lv_core::{Error, IngredientState, ModelParams, TrainOptions};
use proptest::prelude::*;

fn st(i: usize) -> IngredientState {
    IngredientState::from_index(i)
}

fn binding(variable: Variable, position: usize, value: Value, origin: Origin) -> Binding {
    Binding { variable, position, value, origin }
}

fn transition(bindings: Vec<Binding>) -> ScoredTerm {
    ScoredTerm { kind: TermKind::Transition, position: 5, log_value: -1.0, weight: 1.0, from_prefix: false, bindings }
}

#[test]
fn argmax_selected_wrong_state_is_a_parasite() {
    let case = descriptive_phrase_case();
    // gold state of "quality" (position 4) is 0
    let term = transition(vec![
        binding(Variable::State, 5, Value::State(st(1)), Origin::Hypothesis),
        binding(Variable::PrevState2, 3, Value::State(st(0)), Origin::ArgmaxSelected),
        binding(Variable::PrevState, 4, Value::State(st(1)), Origin::ArgmaxSelected),
    ]);
    let v = classify_term(&term, &case.sentence).unwrap();
    assert_eq!(v.verdict, Verdict::Parasite);
    assert_eq!(v.offending.len(), 1);
    assert_eq!(v.offending[0].position, 4);
}

#[test]
fn structural_tag_mismatch_is_a_parasite() {
    let case = descriptive_phrase_case();
    let adjective = case.corpus.tagset().index_of("E").unwrap();
    let term = transition(vec![binding(Variable::PrevTag, 4, Value::Tag(adjective), Origin::Structural)]);
    assert_eq!(classify_term(&term, &case.sentence).unwrap().verdict, Verdict::Parasite);
}

#[test]
fn hypothesis_bindings_are_exempt() {
    let case = descriptive_phrase_case();
    let term = transition(vec![binding(Variable::State, 5, Value::State(st(3)), Origin::Hypothesis)]);
    let v = classify_term(&term, &case.sentence).unwrap();
    assert_eq!(v.verdict, Verdict::Sane);
    assert!(v.offending.is_empty());
}

#[test]
fn out_of_range_binding_is_an_error() {
    let case = descriptive_phrase_case();
    let term = transition(vec![binding(Variable::PrevState, 40, Value::State(st(0)), Origin::ArgmaxSelected)]);
    assert!(matches!(classify_term(&term, &case.sentence), Err(Error::PositionOutOfRange { .. })));
}

proptest! {
    #[test]
    fn gold_consistent_bindings_are_sane(
        picks in prop::collection::vec((0usize..7, any::<bool>(), prop::sample::select(vec![Origin::ArgmaxSelected, Origin::Structural])), 0..6)
    ) {
        let case = descriptive_phrase_case();
        let tags = case.sentence.gold_tags().unwrap();
        let states = case.sentence.gold_states().unwrap();
        let bindings = picks
            .into_iter()
            .map(|(p, is_tag, origin)| {
                if is_tag {
                    binding(Variable::PrevTag, p, Value::Tag(tags[p]), origin)
                } else {
                    binding(Variable::PrevState, p, Value::State(states[p]), origin)
                }
            })
            .collect();
        prop_assert_eq!(classify_term(&transition(bindings), &case.sentence).unwrap().verdict, Verdict::Sane);
    }
}

fn trained(case: &lv_core::synth::AuditCase) -> ModelParams {
    ModelParams::train(&case.corpus, &TrainOptions::default()).unwrap()
}

#[test]
fn simple_double_cell_has_exactly_one_flagged_row() {
    let case = descriptive_phrase_case();
    let params = trained(&case);
    let trace = decode_with_first_layer(Variant::DoubleSimple, &case.sentence, &params, FirstLayerMode::Gold).unwrap();
    let cell = trace.top_cells(case.position, 1).unwrap()[0];
    let table = build_situations_table(&trace, &case.sentence, cell).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.flagged_rows(), 1);
    let text = table.render(case.corpus.tagset());
    assert!(text.contains("~Tr-1=E~"), "{text}");
}

#[test]
fn transfer_cell_is_clean_under_gold_tags() {
    let case = descriptive_phrase_case();
    let params = trained(&case);
    let trace =
        decode_with_first_layer(Variant::DoubleTransfer, &case.sentence, &params, FirstLayerMode::Gold).unwrap();
    let cell = trace.top_cells(case.position, 1).unwrap()[0];
    let table = build_situations_table(&trace, &case.sentence, cell).unwrap();
    assert_eq!(table.flagged_rows(), 0);
    assert!(table.render(case.corpus.tagset()).contains("Tr-1=D"));
    assert!(matches!(
        build_situations_table(&trace, &case.sentence, Cell { position: 99, row: 0, col: 0 }),
        Err(Error::InvalidCell)
    ));
}

#[test]
fn transfer_has_fewer_parasites_in_both_constructions() {
    for case in [descriptive_phrase_case(), unknown_modifier_case()] {
        let params = trained(&case);
        let count = |v: Variant| {
            let trace = decode_with_first_layer(v, &case.sentence, &params, FirstLayerMode::Gold).unwrap();
            (
                count_parasites(&trace, &case.sentence, case.position, 2).unwrap(),
                count_tag_parasites(&trace, &case.sentence, case.position, 2).unwrap(),
            )
        };
        let (simple, _) = count(Variant::DoubleSimple);
        let (transfer, transfer_tags) = count(Variant::DoubleTransfer);
        assert!(simple >= 1);
        assert!(transfer < simple);
        assert_eq!(transfer_tags, 0);
    }
}

#[test]
fn top_k_beyond_candidates_is_clamped() {
    let case = descriptive_phrase_case();
    let params = trained(&case);
    let trace =
        decode_with_first_layer(Variant::DoubleSimple, &case.sentence, &params, FirstLayerMode::Gold).unwrap();
    let all = count_parasites(&trace, &case.sentence, case.position, 4).unwrap();
    assert_eq!(count_parasites(&trace, &case.sentence, case.position, 50).unwrap(), all);
    assert!(count_parasites(&trace, &case.sentence, case.position, 0).is_err());
}

fn report_options(case: &lv_core::synth::AuditCase) -> SensitivityOptions {
    SensitivityOptions { similar: Some(case.similar.clone()), ..SensitivityOptions::default() }
}

#[test]
fn reports_recount_to_their_stored_total() {
    let case = descriptive_phrase_case();
    let reports = sensitivity_report(
        &case.corpus,
        &case.sentence,
        case.position,
        &Variant::ALL,
        &Condition::ALL,
        &report_options(&case),
    )
    .unwrap();
    assert_eq!(reports.len(), 16);
    for r in &reports {
        assert_eq!(r.recount(), r.parasite_count);
        assert!(!r.hypotheses.is_empty() && r.hypotheses.len() <= 3);
    }
}

#[test]
fn base_second_order_report_lists_the_best_cells() {
    let case = descriptive_phrase_case();
    let params = trained(&case);
    let reports = sensitivity_report(
        &case.corpus,
        &case.sentence,
        6,
        &[Variant::MonoSecond],
        &[Condition::Base],
        &SensitivityOptions::default(),
    )
    .unwrap();
    let trace = decode_with_first_layer(Variant::MonoSecond, &case.sentence, &params, FirstLayerMode::Gold).unwrap();
    let mut deltas: Vec<f64> = trace.candidate_cells(6).into_iter().map(|c| trace.delta(c)).collect();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let scores: Vec<f64> = reports[0].hypotheses.iter().map(|h| h.score).collect();
    assert_eq!(scores, deltas[..3]);
}

#[test]
fn duplicate_weakly_raises_the_gold_hypothesis() {
    let case = descriptive_phrase_case();
    let run = |c: Condition| {
        sensitivity_report(&case.corpus, &case.sentence, case.position, &[Variant::DoubleTransfer], &[c], &report_options(&case))
            .unwrap()
            .remove(0)
    };
    let gold_col = case.sentence.gold_states().unwrap()[case.position].index();
    let gold_score = |r: &SensitivityReport| {
        r.hypotheses.iter().find(|h| h.cell.col == gold_col).map(|h| h.score).unwrap()
    };
    assert!(gold_score(&run(Condition::Duplicate)) >= gold_score(&run(Condition::Base)));
}

#[test]
fn duplicate_needs_a_corpus_member() {
    let case = descriptive_phrase_case();
    let r = sensitivity_report(
        &case.corpus,
        &case.similar,
        case.position,
        &[Variant::DoubleTransfer],
        &[Condition::Duplicate],
        &SensitivityOptions::default(),
    );
    assert!(matches!(r, Err(Error::SentenceNotInCorpus)));
}

#[test]
fn unknown_word_condition_reads_the_prefix_table() {
    let case = descriptive_phrase_case();
    let corpus = conditioned_corpus(&case.corpus, &case.sentence, case.position, Condition::UnknownWord, None).unwrap();
    let params = ModelParams::train(&corpus, &TrainOptions::default()).unwrap();
    assert!(!params.is_known(case.sentence.surface(case.position)));
    let trace =
        decode_with_first_layer(Variant::DoubleTransfer, &case.sentence, &params, FirstLayerMode::Gold).unwrap();
    for cell in trace.candidate_cells(case.position) {
        let lexical: Vec<_> =
            trace.cell_terms(cell).unwrap().iter().filter(|t| t.kind == TermKind::Lexical).collect();
        assert!(lexical.iter().all(|t| t.from_prefix));
    }
}

#[test]
fn condition_names_round_trip() {
    for c in Condition::ALL {
        assert_eq!(c.name().parse::<Condition>().unwrap(), c);
    }
    assert!("twice".parse::<Condition>().is_err());
}
