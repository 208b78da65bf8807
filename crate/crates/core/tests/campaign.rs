//! Campaign-level behavior: config documents, identifier resolution,
//! determinism, and the production-phase rules.

use metamorph_core::engine::relation::RelationDescriptor;
use metamorph_core::subjects::binsearch::{self, BinSearch, BinSearchInput};
use metamorph_core::subjects::kth;
use metamorph_core::{
    apply_relation, run_campaign, run_campaign_outcome, run_subject, to_stable_json,
    CampaignConfig, EngineError, Outcome, Phase, Relation, RelationSelect, SourceOverrides,
    VerdictKind,
};

fn base_config(subject: &str) -> CampaignConfig {
    CampaignConfig {
        subject: subject.to_string(),
        variants: vec!["correct".to_string()],
        relations: RelationSelect::all(),
        trials: 20,
        seed: 11,
        phase: Phase::Testing,
        fixture: None,
    }
}

#[test]
fn config_documents_parse_and_run() {
    let doc = r#"{
        "subject": "binsearch",
        "variants": ["correct", "mutant-split"],
        "relations": ["split-neighbors", "existence-probe"],
        "trials": 10,
        "seed": 3,
        "phase": "testing",
        "fixture": "paper-3.1"
    }"#;
    let config: CampaignConfig = serde_json::from_str(doc).unwrap();
    let matrix = run_campaign(&config).unwrap();
    assert_eq!(matrix.rows.len(), 4);
    for row in &matrix.rows {
        assert_eq!(
            row.trials,
            row.passes + row.fails + row.abandoned + row.inapplicable
        );
        assert_eq!(row.trials, 10);
    }
    assert_eq!(matrix.row("correct", "split-neighbors").unwrap().fails, 0);
}

#[test]
fn fixture_files_load_per_subject_schema() {
    let dir = std::env::temp_dir().join(format!("metamorph-fixture-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("small.json");
    std::fs::write(&path, r#"{ "array": [2, 4, 9], "lo": 1, "hi": 3 }"#).unwrap();

    let mut config = base_config("binsearch");
    config.fixture = Some(path.to_string_lossy().into_owned());
    let matrix = run_campaign(&config).unwrap();
    assert_eq!(matrix.total_fails(), 0);

    std::fs::write(&path, r#"{ "array": [9, 2], "lo": 1, "hi": 2 }"#).unwrap();
    assert!(matches!(run_campaign(&config), Err(EngineError::Input(_))));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_identifiers_are_config_errors_naming_the_id() {
    let mut config = base_config("nosuch");
    let err = run_campaign(&config).unwrap_err();
    assert!(matches!(err, EngineError::Config(ref m) if m.contains("nosuch")));

    config = base_config("binsearch");
    config.variants = vec!["mutant-missing".to_string()];
    let err = run_campaign(&config).unwrap_err();
    assert!(matches!(err, EngineError::Config(ref m) if m.contains("mutant-missing")));

    config = base_config("binsearch");
    config.relations = RelationSelect::named(["row-swap"]);
    let err = run_campaign(&config).unwrap_err();
    assert!(matches!(err, EngineError::Config(ref m) if m.contains("row-swap")));

    config = base_config("binsearch");
    config.trials = 0;
    assert!(matches!(run_campaign(&config), Err(EngineError::Config(_))));
}

#[test]
fn overrides_require_a_fixture_and_a_matching_subject() {
    let mut config = base_config("binsearch");
    let overrides = SourceOverrides {
        key: Some(25),
        ..SourceOverrides::default()
    };
    let err = run_campaign_outcome(&config, &overrides).unwrap_err();
    assert!(matches!(err, EngineError::Config(ref m) if m.contains("fixture")));

    config.fixture = Some("paper-3.1".to_string());
    let wrong = SourceOverrides {
        key: Some(25),
        src: Some("a".to_string()),
        ..SourceOverrides::default()
    };
    let err = run_campaign_outcome(&config, &wrong).unwrap_err();
    assert!(matches!(err, EngineError::Config(ref m) if m.contains("--src")));
}

#[test]
fn campaigns_are_deterministic_for_a_fixed_seed() {
    for subject in metamorph_core::SUBJECTS {
        let mut config = base_config(subject);
        config.variants = Vec::new(); // every variant
        let a = run_campaign_outcome(&config, &SourceOverrides::default()).unwrap();
        let b = run_campaign_outcome(&config, &SourceOverrides::default()).unwrap();
        assert_eq!(a, b, "outcome differs for {subject}");
        assert_eq!(to_stable_json(&a.matrix), to_stable_json(&b.matrix));
    }
}

#[test]
fn verdicts_are_deterministic_for_identical_inputs() {
    let source = run_subject::<BinSearch>(
        &binsearch::Correct,
        BinSearchInput {
            key: 5,
            fixture: binsearch::paper_fixture(),
        },
        Phase::Testing,
    )
    .unwrap();
    let relation = binsearch::ExistenceProbe::new();
    let a = apply_relation(&relation, &source, &binsearch::Correct, Phase::Testing, 42).unwrap();
    let b = apply_relation(&relation, &source, &binsearch::Correct, Phase::Testing, 42).unwrap();
    assert_eq!(a, b);
    let c = apply_relation(&relation, &source, &binsearch::Correct, Phase::Testing, 43).unwrap();
    // a different seed may draw a different probe index
    assert_eq!(c.kind, VerdictKind::Pass);
}

#[test]
fn relation_subject_mismatch_is_a_config_error() {
    struct Mislabeled(RelationDescriptor);
    impl Relation<BinSearch> for Mislabeled {
        fn descriptor(&self) -> &RelationDescriptor {
            &self.0
        }
        fn check(
            &self,
            _source: &metamorph_core::engine::ExecutionOf<BinSearch>,
            _ctx: &mut metamorph_core::engine::ApplyCtx<'_, BinSearch>,
        ) -> Outcome {
            Outcome::Pass
        }
    }
    let relation = Mislabeled(RelationDescriptor {
        id: "wrong-home",
        subject: "kth",
        suspected_error: "n/a",
        production_safe: true,
    });
    let source = run_subject::<BinSearch>(
        &binsearch::Correct,
        BinSearchInput {
            key: 25,
            fixture: binsearch::paper_fixture(),
        },
        Phase::Testing,
    )
    .unwrap();
    let err =
        apply_relation(&relation, &source, &binsearch::Correct, Phase::Testing, 0).unwrap_err();
    assert!(matches!(err, EngineError::Config(_)));
}

#[test]
fn production_campaigns_refuse_writing_variants_before_execution() {
    for subject in ["binsearch", "kth"] {
        let mut config = base_config(subject);
        config.variants = vec!["mutant-overwrite".to_string()];
        config.phase = Phase::Production;
        let err = run_campaign(&config).unwrap_err();
        assert!(
            matches!(err, EngineError::PhaseViolation(ref m) if m.contains("mutant-overwrite")),
            "{subject}: {err}"
        );
    }
}

#[test]
fn running_a_writing_variant_in_production_is_refused() {
    let err = run_subject::<BinSearch>(
        &binsearch::MutantOverwrite,
        BinSearchInput {
            key: 5,
            fixture: binsearch::paper_fixture(),
        },
        Phase::Production,
    )
    .unwrap_err();
    assert!(matches!(err, EngineError::PhaseViolation(_)));
}

#[test]
fn production_write_is_recorded_and_fails_the_relation() {
    // a source that wrote its data view forces a production-write failure
    // on any relation applied under production phase
    let source = run_subject::<BinSearch>(
        &binsearch::MutantOverwrite,
        BinSearchInput {
            key: 5,
            fixture: binsearch::paper_fixture(),
        },
        Phase::Testing,
    )
    .unwrap();
    assert!(source.wrote_data);
    let verdict = apply_relation(
        &binsearch::GapProbe::new(),
        &source,
        &binsearch::MutantOverwrite,
        Phase::Production,
        5,
    )
    .unwrap();
    assert_eq!(verdict.kind, VerdictKind::Fail);
    assert_eq!(verdict.reason, "production-write");
    assert!(verdict.phase_violation);
    assert!(
        verdict.followups.is_empty(),
        "nothing ran after the refusal"
    );
}

#[test]
fn production_followups_of_writing_variants_fail_loudly() {
    // the source run stayed clean, but any follow-up would go through a
    // writing variant: refused and recorded
    let source = run_subject::<kth::KthOccurrence>(
        &kth::MutantOverwrite,
        kth::KthInput {
            key: 9,
            k: 1,
            fixture: kth::paper_fixture(),
        },
        Phase::Testing,
    )
    .unwrap();
    assert!(!source.wrote_data, "absent key never triggers the fault");
    let verdict = apply_relation(
        &kth::ExistenceProbe::new(),
        &source,
        &kth::MutantOverwrite,
        Phase::Production,
        2,
    )
    .unwrap();
    assert_eq!(verdict.kind, VerdictKind::Fail);
    assert_eq!(verdict.reason, "production-write");
    assert!(verdict.phase_violation);
    assert!(verdict.followups.iter().all(|f| !f.wrote_data));
}

#[test]
fn production_campaigns_on_correct_variants_stay_clean() {
    for subject in metamorph_core::SUBJECTS {
        let mut config = base_config(subject);
        config.phase = Phase::Production;
        let outcome = run_campaign_outcome(&config, &SourceOverrides::default()).unwrap();
        assert_eq!(outcome.total_fails(), 0, "{subject}");
        for (_, entries) in &outcome.per_variant_entries {
            for entry in entries {
                assert_ne!(entry.reason, "production-write", "{subject}");
            }
        }
    }
}

#[test]
fn zero_cost_sources_have_no_ratio() {
    // an empty search range finishes without touching any element
    let source = run_subject::<BinSearch>(
        &binsearch::Correct,
        BinSearchInput {
            key: 3,
            fixture: binsearch::SortedFixture {
                elements: vec![],
                lo: 1,
                hi: 0,
            },
        },
        Phase::Testing,
    )
    .unwrap();
    assert_eq!(source.cost.steps(), 0);
    assert_eq!(source.output.position, -1);
    let verdict = apply_relation(
        &binsearch::ExistenceProbe::new(),
        &source,
        &binsearch::Correct,
        Phase::Testing,
        1,
    )
    .unwrap();
    assert_eq!(verdict.kind, VerdictKind::Inapplicable);
    assert!(matches!(
        metamorph_core::oh_ratio(&verdict, source.cost),
        Err(EngineError::UndefinedRatio(_))
    ));
}

#[test]
fn detection_shows_up_in_matrix_rows() {
    // binsearch: the splitting fault trips both the miss probe and the
    // neighbor probe over random arrays
    let mut config = base_config("binsearch");
    config.variants = vec!["mutant-split".to_string()];
    config.trials = 200;
    config.seed = 1;
    let matrix = run_campaign(&config).unwrap();
    assert!(matrix.row("mutant-split", "existence-probe").unwrap().fails >= 1);
    assert!(matrix.row("mutant-split", "split-neighbors").unwrap().fails >= 1);

    // gauss: the stale pivot survives most random systems but not all
    let mut config = base_config("gauss");
    config.variants = vec!["mutant-pivot".to_string()];
    config.trials = 500;
    config.seed = 1;
    let matrix = run_campaign(&config).unwrap();
    assert!(matrix.row("mutant-pivot", "row-swap").unwrap().fails >= 1);

    // shortest path: one fixture trial suffices for the reverse probe
    let mut config = base_config("shortest-path");
    config.variants = vec!["mutant-relax".to_string()];
    config.relations = RelationSelect::named(["reverse-path"]);
    config.trials = 1;
    config.fixture = Some("fig1-like".to_string());
    let overrides = SourceOverrides {
        src: Some("c".to_string()),
        dst: Some("a".to_string()),
        ..SourceOverrides::default()
    };
    let outcome = run_campaign_outcome(&config, &overrides).unwrap();
    assert_eq!(
        outcome
            .matrix
            .row("mutant-relax", "reverse-path")
            .unwrap()
            .fails,
        1
    );
}

#[test]
fn accounting_holds_across_every_matrix_cell() {
    let mut config = base_config("kth");
    config.variants = Vec::new();
    config.trials = 50;
    let matrix = run_campaign(&config).unwrap();
    assert_eq!(matrix.rows.len(), 15); // 3 variants x 5 relations
    for row in &matrix.rows {
        assert_eq!(
            row.trials,
            row.passes + row.fails + row.abandoned + row.inapplicable,
            "{row:?}"
        );
    }
}
