//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its elapsed time (visible with `cargo test -- --nocapture`).

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use metamorph_core::engine::campaign::CampaignSubject;
use metamorph_core::subjects::binsearch::{self, BinSearch, BinSearchInput, SortedFixture};
use metamorph_core::subjects::kth::{self, KthInput, KthOccurrence, UnsortedFixture};
use metamorph_core::subjects::linear_solver::{
    self, residual_check, GaussianElimination, LinearSystem,
};
use metamorph_core::subjects::shortest_path::{
    self, oracle_all_paths, PathQuery, ShortestPath, WeightedGraph,
};
use metamorph_core::{
    apply_relation, run_campaign_outcome, run_resolved_campaign, run_subject, CampaignConfig,
    Phase, RelationSelect, ResolvedCampaign, SourceOverrides, VerdictKind,
};

fn report(criterion: u32, name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("acceptance {criterion} ({name}): PASS in {elapsed:.2?}");
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its {budget:.0?} budget: {elapsed:.2?}"
    );
}

#[test]
fn criterion_1_binsearch_splitting_episode() {
    let started = Instant::now();
    let fixture = binsearch::paper_fixture();

    // pre-verified listing simulation: the dropped-element keys come back absent
    for key in [18, 40] {
        let probe = run_subject::<BinSearch>(
            &binsearch::MutantSplit,
            BinSearchInput {
                key,
                fixture: fixture.clone(),
            },
            Phase::Testing,
        )
        .unwrap();
        assert_eq!(probe.output.position, -1);
    }

    let source = run_subject::<BinSearch>(
        &binsearch::MutantSplit,
        BinSearchInput { key: 25, fixture },
        Phase::Testing,
    )
    .unwrap();
    assert_eq!(source.output.position, 6);

    let verdict = apply_relation(
        &binsearch::SplitNeighbors::new(),
        &source,
        &binsearch::MutantSplit,
        Phase::Testing,
        1,
    )
    .unwrap();
    assert_eq!(verdict.kind, VerdictKind::Fail);
    let probes: Vec<(i64, i64)> = verdict
        .followups
        .iter()
        .map(|f| (f.input.key, f.output.position))
        .collect();
    assert_eq!(probes, vec![(18, -1), (40, -1)]);

    report(
        1,
        "binsearch splitting episode",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_kth_initialization_episode() {
    let started = Instant::now();
    let source = run_subject::<KthOccurrence>(
        &kth::MutantInit,
        KthInput {
            key: 1,
            k: 2,
            fixture: kth::paper_fixture(),
        },
        Phase::Testing,
    )
    .unwrap();
    assert_eq!(source.output.position, 5);

    let verdict = apply_relation(
        &kth::WrongOccurrence::new(),
        &source,
        &kth::MutantInit,
        Phase::Testing,
        1,
    )
    .unwrap();
    assert_eq!(verdict.kind, VerdictKind::Fail);
    // the revealing follow-up: first occurrence of 1 within the 5..7 tail
    let tail = verdict
        .followups
        .iter()
        .find(|f| (f.input.fixture.lo, f.input.fixture.hi) == (5, 7))
        .expect("tail probe present");
    assert_eq!((tail.input.key, tail.input.k), (1, 1));
    assert_eq!(tail.output.position, -1, "expected 5, mutant reports -1");

    report(
        2,
        "kth initialization episode",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_3_gauss_pivot_episode() {
    let started = Instant::now();
    let fixture = linear_solver::paper_fixture();
    let source = run_subject::<GaussianElimination>(
        &linear_solver::MutantPivot,
        fixture.clone(),
        Phase::Testing,
    )
    .unwrap();

    let x = source.output.solution().expect("apparently correct output");
    let expected = [0.0, 0.0, 1.0 / 3.0];
    for (a, b) in x.iter().zip(expected) {
        assert!((a - b).abs() <= 1e-9, "got {x:?}");
    }
    assert_eq!(residual_check(&fixture, &source.output), Some(true));

    let verdict = apply_relation(
        &linear_solver::RowSwap::new().with_rows(2, 3),
        &source,
        &linear_solver::MutantPivot,
        Phase::Testing,
        1,
    )
    .unwrap();
    assert_eq!(verdict.kind, VerdictKind::Fail);
    assert_eq!(verdict.reason, "follow-up reported no solution");

    report(3, "gauss pivot episode", started, Duration::from_secs(1));
}

#[test]
fn criterion_4_shortest_path_substitute_episode() {
    let started = Instant::now();
    let graph = shortest_path::fig1_like_fixture();

    // fixture validation: the correct program matches the all-paths
    // oracle on every ordered pair
    for src in 1..=4usize {
        for dst in 1..=4usize {
            if src == dst {
                continue;
            }
            let q = PathQuery {
                src,
                dst,
                graph: graph.clone(),
            };
            let exec =
                run_subject::<ShortestPath>(&shortest_path::Correct, q.clone(), Phase::Testing)
                    .unwrap();
            let oracle = oracle_all_paths(&q).unwrap();
            assert!(exec.output.reachable && oracle.reachable);
            assert_eq!(exec.output.distance, oracle.distance);
        }
    }

    // the reverse relation reveals the relaxation fault on (c, a)
    let source = run_subject::<ShortestPath>(
        &shortest_path::MutantRelax,
        PathQuery {
            src: graph.resolve_vertex("c").unwrap(),
            dst: graph.resolve_vertex("a").unwrap(),
            graph: graph.clone(),
        },
        Phase::Testing,
    )
    .unwrap();
    let verdict = apply_relation(
        &shortest_path::ReversePath::new(),
        &source,
        &shortest_path::MutantRelax,
        Phase::Testing,
        1,
    )
    .unwrap();
    assert_eq!(verdict.kind, VerdictKind::Fail, "{}", verdict.reason);

    // every relation passes for the correct program on every pair
    for src in 1..=4usize {
        for dst in 1..=4usize {
            if src == dst {
                continue;
            }
            let source = run_subject::<ShortestPath>(
                &shortest_path::Correct,
                PathQuery {
                    src,
                    dst,
                    graph: graph.clone(),
                },
                Phase::Testing,
            )
            .unwrap();
            for relation in <ShortestPath as CampaignSubject>::relations() {
                let verdict = apply_relation(
                    relation.as_ref(),
                    &source,
                    &shortest_path::Correct,
                    Phase::Testing,
                    4,
                )
                .unwrap();
                assert_ne!(
                    verdict.kind,
                    VerdictKind::Fail,
                    "{} failed on ({src},{dst}): {}",
                    relation.descriptor().id,
                    verdict.reason
                );
            }
        }
    }

    report(
        4,
        "shortest-path substitute episode",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_5_soundness_over_ten_thousand_trials() {
    let started = Instant::now();
    for subject in metamorph_core::SUBJECTS {
        let config = CampaignConfig {
            subject: subject.to_string(),
            variants: vec!["correct".to_string()],
            relations: RelationSelect::all(),
            trials: 10_000,
            seed: 20_260_811,
            phase: Phase::Testing,
            fixture: None,
        };
        let outcome = run_campaign_outcome(&config, &SourceOverrides::default()).unwrap();
        for row in &outcome.matrix.rows {
            assert_eq!(
                row.fails, 0,
                "correct {subject} failed relation {}",
                row.relation
            );
            assert_eq!(row.trials, 10_000);
        }
    }
    report(5, "soundness suites", started, Duration::from_secs(60));
}

#[test]
fn criterion_6_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(617);

    // binary search vs linear scan, lengths 0..=64
    for _ in 0..10_000 {
        let len = rng.gen_range(0..=64usize);
        let mut elements = Vec::with_capacity(len);
        let mut v = rng.gen_range(-100..=100i64);
        for _ in 0..len {
            elements.push(v);
            v += rng.gen_range(1..=9i64);
        }
        let fixture = SortedFixture::covering(elements);
        let key = rng.gen_range(-120..=700i64);
        let expected = (fixture.lo..=fixture.hi)
            .find(|&i| fixture.get(i) == Some(key))
            .unwrap_or(-1);
        let exec = run_subject::<BinSearch>(
            &binsearch::Correct,
            BinSearchInput { key, fixture },
            Phase::Testing,
        )
        .unwrap();
        assert_eq!(exec.output.position, expected);
    }

    // k-th occurrence vs counting scan
    for _ in 0..10_000 {
        let len = rng.gen_range(1..=64usize);
        let elements: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=9)).collect();
        let fixture = UnsortedFixture::covering(elements);
        let key = rng.gen_range(0..=9i64);
        let k = rng.gen_range(1..=fixture.range_len());
        let mut seen = 0;
        let expected = (fixture.lo..=fixture.hi)
            .find(|&i| {
                if fixture.get(i) == Some(key) {
                    seen += 1;
                }
                seen == k && fixture.get(i) == Some(key)
            })
            .unwrap_or(-1);
        let exec = run_subject::<KthOccurrence>(
            &kth::Correct,
            KthInput { key, k, fixture },
            Phase::Testing,
        )
        .unwrap();
        assert_eq!(exec.output.position, expected);
    }

    // Dijkstra vs all-paths enumeration on graphs of at most 8 vertices
    for _ in 0..10_000 {
        let q = <ShortestPath as CampaignSubject>::generate_input(&mut rng, None);
        assert!(q.graph.vertex_count <= 8);
        let exec = run_subject::<ShortestPath>(&shortest_path::Correct, q.clone(), Phase::Testing)
            .unwrap();
        let oracle = oracle_all_paths(&q).unwrap();
        assert_eq!(exec.output.reachable, oracle.reachable);
        if oracle.reachable {
            assert_eq!(
                exec.output.distance,
                oracle.distance,
                "query {:?}",
                (q.src, q.dst)
            );
        }
    }

    // Gaussian elimination residuals on well-conditioned systems
    for _ in 0..10_000 {
        let system: LinearSystem =
            <GaussianElimination as CampaignSubject>::generate_input(&mut rng, None);
        let exec = run_subject::<GaussianElimination>(
            &linear_solver::Correct,
            system.clone(),
            Phase::Testing,
        )
        .unwrap();
        assert_eq!(residual_check(&system, &exec.output), Some(true));
    }

    report(6, "oracle equivalence", started, Duration::from_secs(120));
}

#[test]
fn criterion_7_oh_property_at_depth() {
    let started = Instant::now();
    // one seeded 4096-element sorted array, keys drawn per trial
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    let mut elements = Vec::with_capacity(4096);
    let mut v: i64 = -20_000;
    for _ in 0..4096 {
        elements.push(v);
        v += rng.gen_range(1..=9);
    }
    let fixture = SortedFixture::covering(elements);

    let config = CampaignConfig {
        subject: "binsearch".to_string(),
        variants: vec!["correct".to_string()],
        relations: RelationSelect::all(),
        trials: 1_000,
        seed: 7,
        phase: Phase::Testing,
        fixture: None,
    };
    let resolved = ResolvedCampaign::<BinSearch>::from_config(
        &config,
        Some(fixture),
        &SourceOverrides::default(),
    )
    .unwrap();
    let outcome = run_resolved_campaign(&resolved).unwrap();

    let mut with_ratio = 0u64;
    let mut below_one = 0u64;
    for (_, entries) in &outcome.per_variant_entries {
        for entry in entries {
            match entry.verdict {
                VerdictKind::Pass | VerdictKind::Fail => {
                    let ratio = entry
                        .oh_ratio
                        .expect("executed applications report a ratio");
                    with_ratio += 1;
                    if ratio < 1.0 {
                        below_one += 1;
                    }
                }
                VerdictKind::Abandoned | VerdictKind::Inapplicable => {
                    assert_eq!(entry.oh_ratio, None);
                }
            }
        }
    }
    assert!(
        with_ratio >= 1_000,
        "only {with_ratio} measured applications"
    );
    let share = below_one as f64 / with_ratio as f64;
    assert!(
        share >= 0.99,
        "only {share:.4} of {with_ratio} applications were cheaper than their source"
    );
    // ratios surface in the matrix as well
    for row in &outcome.matrix.rows {
        if row.passes + row.fails > 0 {
            assert!(row.mean_oh_ratio.is_some(), "{row:?}");
        }
    }

    report(
        7,
        "oh property at n = 4096",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_8_production_phase_rules() {
    let started = Instant::now();

    // writing mutants are refused before execution
    for (subject, variant) in [
        ("binsearch", "mutant-overwrite"),
        ("kth", "mutant-overwrite"),
    ] {
        let config = CampaignConfig {
            subject: subject.to_string(),
            variants: vec![variant.to_string()],
            relations: RelationSelect::all(),
            trials: 1,
            seed: 1,
            phase: Phase::Production,
            fixture: None,
        };
        let err = run_campaign_outcome(&config, &SourceOverrides::default()).unwrap_err();
        assert!(
            matches!(err, metamorph_core::EngineError::PhaseViolation(_)),
            "{subject}/{variant}: {err}"
        );
    }

    // read-only relations complete normally and no production follow-up
    // ever writes
    let sources = [
        (25, binsearch::paper_fixture()),
        (5, binsearch::paper_fixture()),
        (7, SortedFixture::covering(vec![7])),
    ];
    for (key, fixture) in sources {
        let source = run_subject::<BinSearch>(
            &binsearch::Correct,
            BinSearchInput { key, fixture },
            Phase::Production,
        )
        .unwrap();
        assert!(!source.wrote_data);
        for relation in <BinSearch as CampaignSubject>::relations() {
            let verdict = apply_relation(
                relation.as_ref(),
                &source,
                &binsearch::Correct,
                Phase::Production,
                8,
            )
            .unwrap();
            assert_ne!(verdict.kind, VerdictKind::Fail, "{}", verdict.reason);
            assert!(!verdict.phase_violation);
            for followup in &verdict.followups {
                assert!(!followup.wrote_data, "production follow-up wrote data");
            }
        }
    }

    // the same holds across whole production campaigns of every subject
    for subject in metamorph_core::SUBJECTS {
        let config = CampaignConfig {
            subject: subject.to_string(),
            variants: vec!["correct".to_string()],
            relations: RelationSelect::all(),
            trials: 200,
            seed: 9,
            phase: Phase::Production,
            fixture: None,
        };
        let outcome = run_campaign_outcome(&config, &SourceOverrides::default()).unwrap();
        assert_eq!(outcome.total_fails(), 0, "{subject}");
    }

    report(
        8,
        "production phase rules",
        started,
        Duration::from_secs(30),
    );
}

/// The graph type stays available for fixture-driven experiments.
#[test]
fn fixture_graph_resolves_labels() {
    let graph: WeightedGraph = shortest_path::fig1_like_fixture();
    assert_eq!(graph.resolve_vertex("c"), Some(3));
    assert_eq!(graph.resolve_vertex("4"), Some(4));
    assert_eq!(graph.resolve_vertex("z"), None);
}
