//! Structural tests for the generation pipelines against the scripted mock
//! endpoint: session shapes, chunk accounting, hybrid structure, campaign
//! error policy, and transcript replay determinism.

use ideabench::generation::{
    replay_hybrid, replay_session, run_campaign, run_chain_of_thought, run_chunked, run_hybrid,
    run_single_shot, GenError, MockEndpoint, PipelineKind, SessionTranscript, StrategyCatalog,
    StrategySpec, TranscriptRole,
};
use ideabench::model::save_pool;

fn catalog_strategy(id: &str) -> StrategySpec {
    StrategyCatalog::bundled().get(id).unwrap().clone()
}

#[test]
fn single_shot_session_produces_full_pool() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(7);
    let (pool, transcript) = run_single_shot(&strategy, &mock, 0, 0).unwrap();
    assert_eq!(pool.len(), 100);
    assert_eq!(transcript.exchanges.len(), 1);
    let indices: Vec<usize> = pool.ideas.iter().map(|i| i.idea_index).collect();
    assert_eq!(indices, (0..100).collect::<Vec<_>>());
    assert_eq!(pool.provenance["pipeline"], "single_shot");
    pool.validate().unwrap();
}

#[test]
fn eighty_of_hundred_is_short_output() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(7).with_output_fraction(0.8);
    match run_single_shot(&strategy, &mock, 0, 0) {
        Err(GenError::ShortOutput { expected, parsed, transcript }) => {
            assert_eq!(expected, 100);
            assert_eq!(parsed, 80);
            assert_eq!(transcript.exchanges.len(), 1);
        }
        other => panic!("expected short output, got {other:?}"),
    }
}

#[test]
fn ninety_of_hundred_is_accepted() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(7).with_output_fraction(0.9);
    let (pool, _) = run_single_shot(&strategy, &mock, 0, 0).unwrap();
    assert_eq!(pool.len(), 90);
}

#[test]
fn chunked_ninety_takes_three_requests() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(1);
    let (pool, transcript) = run_chunked(&strategy, &mock, 0, 90, 0).unwrap();
    assert_eq!(pool.len(), 90);
    assert_eq!(transcript.exchanges.len(), 3);
}

#[test]
fn chunked_hundred_asks_ten_in_final_chunk() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(1);
    let (pool, transcript) = run_chunked(&strategy, &mock, 0, 100, 0).unwrap();
    assert_eq!(pool.len(), 100);
    assert_eq!(transcript.exchanges.len(), 4);
    let last_request = &transcript.exchanges[3].request;
    let last_user = last_request.messages.last().unwrap();
    assert!(last_user.content.contains("next 10 ideas"));
}

#[test]
fn chunked_at_study_scale_issues_forty_requests() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(1);
    let (pool, transcript) = run_chunked(&strategy, &mock, 0, 1200, 0).unwrap();
    assert_eq!(pool.len(), 1200);
    assert_eq!(transcript.exchanges.len(), 40);
    pool.validate().unwrap();
}

#[test]
fn chunked_request_history_grows_monotonically() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(1);
    let (_, transcript) = run_chunked(&strategy, &mock, 0, 90, 0).unwrap();
    let lengths: Vec<usize> = transcript.exchanges.iter().map(|e| e.request.messages.len()).collect();
    assert_eq!(lengths, vec![1, 3, 5], "each chunk carries the full prior conversation");
}

#[test]
fn chunked_rejects_target_below_chunk_size() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(1);
    assert!(matches!(
        run_chunked(&strategy, &mock, 0, 10, 0),
        Err(GenError::Input(_))
    ));
}

#[test]
fn chain_of_thought_reports_compliance() {
    let strategy = catalog_strategy("chain_of_thought");
    let mock = MockEndpoint::new(3);
    let (pool, _, compliance) = run_chain_of_thought(&strategy, &mock, 0, 0).unwrap();
    assert_eq!(pool.len(), 100);
    assert!(compliance, "distinct revision pass should be detected");
    assert_eq!(pool.provenance["step_compliance"], "true");
}

#[test]
fn skipped_revision_flags_noncompliance_but_returns_pool() {
    let strategy = catalog_strategy("chain_of_thought");
    let mock = MockEndpoint::new(3).with_skipped_revision();
    let (pool, _, compliance) = run_chain_of_thought(&strategy, &mock, 0, 0).unwrap();
    assert_eq!(pool.len(), 100);
    assert!(!compliance);
    assert_eq!(pool.provenance["step_compliance"], "false");
}

#[test]
fn hybrid_structure_is_forty_ten_one_hundred() {
    let strategy = catalog_strategy("hybrid_brainstorming");
    let mock = MockEndpoint::new(5);
    let (pool, transcripts) = run_hybrid(&strategy, &mock, 0).unwrap();

    let individuals = transcripts
        .iter()
        .filter(|t| matches!(t.role, TranscriptRole::HybridIndividual { .. }))
        .count();
    let groups = transcripts
        .iter()
        .filter(|t| matches!(t.role, TranscriptRole::HybridGroup { .. }))
        .count();
    assert_eq!(individuals, 40);
    assert_eq!(groups, 10);
    assert_eq!(pool.len(), 100);
    assert_eq!(mock.calls(), 50);
    pool.validate().unwrap();

    // Ideas 0-9 come from group 0, 10-19 from group 1, and so on.
    for (position, idea) in pool.ideas.iter().enumerate() {
        assert_eq!(idea.session_index, position / 10);
        assert_eq!(idea.idea_index, position % 10);
    }
}

#[test]
fn hybrid_group_prompt_numbers_one_hundred_twenty_member_ideas() {
    let strategy = catalog_strategy("hybrid_brainstorming");
    let mock = MockEndpoint::new(5);
    let (_, transcripts) = run_hybrid(&strategy, &mock, 0).unwrap();
    let group0 = transcripts
        .iter()
        .find(|t| matches!(t.role, TranscriptRole::HybridGroup { group: 0 }))
        .unwrap();
    let content = &group0.exchanges[0].request.messages[0].content;
    assert!(content.contains("\n120. "));
    assert!(!content.contains("\n121. "));
    assert!(!content.contains("<ideas>"), "placeholder must be substituted");
}

#[test]
fn wrong_group_size_names_the_group() {
    let strategy = catalog_strategy("hybrid_brainstorming");
    let mock = MockEndpoint::new(5).with_group_count(9);
    match run_hybrid(&strategy, &mock, 0) {
        Err(GenError::GroupOutput { group, got, expected, .. }) => {
            assert_eq!(group, 0);
            assert_eq!(got, 9);
            assert_eq!(expected, 10);
        }
        other => panic!("expected group output error, got {other:?}"),
    }
}

#[test]
fn failed_individual_session_aborts_with_partial_transcripts() {
    let strategy = catalog_strategy("hybrid_brainstorming");
    let mock = MockEndpoint::new(5).with_failure_on_call(4);
    match run_hybrid(&strategy, &mock, 0) {
        Err(GenError::HybridAborted { transcripts, message }) => {
            assert_eq!(transcripts.len(), 4, "four sessions completed before the failure");
            assert!(message.contains("individual session 4"));
        }
        other => panic!("expected hybrid abort, got {other:?}"),
    }
}

#[test]
fn campaign_of_ten_sessions_yields_thousand_ideas() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(11);
    let outcome = run_campaign(&strategy, &mock, 0).unwrap();
    assert_eq!(outcome.pools.len(), 10);
    assert!(outcome.failures.is_empty());
    let total: usize = outcome.pools.iter().map(|p| p.len()).sum();
    assert_eq!(total, 1000);
    // Sessions must not repeat each other verbatim.
    assert_ne!(outcome.pools[0].ideas[0].raw_text, outcome.pools[1].ideas[0].raw_text);
}

#[test]
fn campaign_with_zero_sessions_is_an_input_error() {
    let mut strategy = catalog_strategy("base_prompt");
    strategy.n_sessions = 0;
    let mock = MockEndpoint::new(11);
    assert!(matches!(run_campaign(&strategy, &mock, 0), Err(GenError::Input(_))));
}

#[test]
fn campaign_survives_one_failed_session() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(11).with_failure_on_call(3);
    let outcome = run_campaign(&strategy, &mock, 0).unwrap();
    assert_eq!(outcome.pools.len(), 9);
    assert_eq!(outcome.failures.len(), 1);
    assert_eq!(outcome.failures[0].session_index, 3);
    assert!(outcome.failures[0].message.contains("scripted failure"));
}

#[test]
fn replaying_transcripts_reproduces_pools_byte_for_byte() {
    let mut strategy = catalog_strategy("base_prompt");
    strategy.n_sessions = 2;
    let mock = MockEndpoint::new(13);
    let outcome = run_campaign(&strategy, &mock, 1_700_000_000).unwrap();

    let dir = tempfile::tempdir().unwrap();
    for (i, transcript) in outcome.transcripts.iter().enumerate() {
        let (replayed, _) = replay_session(transcript).unwrap();
        assert_eq!(&replayed, &outcome.pools[i]);

        let original_path = dir.path().join(format!("original-{i}.jsonl"));
        let replayed_path = dir.path().join(format!("replayed-{i}.jsonl"));
        save_pool(&outcome.pools[i], &original_path).unwrap();
        save_pool(&replayed, &replayed_path).unwrap();
        assert_eq!(
            std::fs::read(&original_path).unwrap(),
            std::fs::read(&replayed_path).unwrap()
        );
    }
}

#[test]
fn chunked_replay_reproduces_pool() {
    let strategy = catalog_strategy("base_prompt");
    let mock = MockEndpoint::new(17);
    let (pool, transcript) = run_chunked(&strategy, &mock, 0, 120, 42).unwrap();
    let (replayed, _) = replay_session(&transcript).unwrap();
    assert_eq!(replayed, pool);
}

#[test]
fn hybrid_replay_reproduces_pool() {
    let strategy = catalog_strategy("hybrid_brainstorming");
    let mock = MockEndpoint::new(19);
    let (pool, transcripts) = run_hybrid(&strategy, &mock, 7).unwrap();
    let replayed = replay_hybrid(&transcripts).unwrap();
    assert_eq!(replayed, pool);
}

#[test]
fn transcripts_round_trip_through_disk() {
    let strategy = catalog_strategy("chain_of_thought");
    let mock = MockEndpoint::new(23);
    let (_, transcript, _) = run_chain_of_thought(&strategy, &mock, 1, 5).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("session.json");
    transcript.save(&path).unwrap();
    let loaded = SessionTranscript::load(&path).unwrap();
    assert_eq!(loaded, transcript);

    let (pool_a, compliance_a) = replay_session(&transcript).unwrap();
    let (pool_b, compliance_b) = replay_session(&loaded).unwrap();
    assert_eq!(pool_a, pool_b);
    assert_eq!(compliance_a, compliance_b);
}

#[test]
fn reruns_with_same_seed_are_identical() {
    let strategy = catalog_strategy("base_prompt");
    let first = run_campaign(&strategy, &MockEndpoint::new(29), 0).unwrap();
    let second = run_campaign(&strategy, &MockEndpoint::new(29), 0).unwrap();
    assert_eq!(first.pools, second.pools);
}

#[test]
fn pipeline_mismatch_is_rejected() {
    let single = catalog_strategy("base_prompt");
    let hybrid = catalog_strategy("hybrid_brainstorming");
    let cot = catalog_strategy("chain_of_thought");
    let mock = MockEndpoint::new(1);
    assert!(matches!(run_single_shot(&hybrid, &mock, 0, 0), Err(GenError::Input(_))));
    assert!(matches!(run_hybrid(&single, &mock, 0), Err(GenError::Input(_))));
    assert!(matches!(run_chain_of_thought(&single, &mock, 0, 0), Err(GenError::Input(_))));
    assert!(matches!(
        run_chunked(&cot, &mock, 0, 100, 0),
        Err(GenError::Input(_))
    ));
    let _ = PipelineKind::SingleShot;
}
