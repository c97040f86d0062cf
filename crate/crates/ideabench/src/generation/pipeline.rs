//! The generation pipelines and their auditable transcripts.
//!
//! Every session records each (request, response) exchange. Replaying a
//! transcript reruns only the parsing, so stored runs reproduce their pools
//! byte for byte.

use serde::{Deserialize, Serialize};

use super::endpoint::{ChatEndpoint, ChatMessage, ChatRequest};
use super::parser::{detect_revision_pass, parse_idea_list, ParseMode};
use super::{GenError, PipelineKind, StrategySpec};
use crate::model::{Idea, Pool};

/// Hybrid brainstorming structure: forty individual sessions of thirty
/// ideas, teamed up four at a time into ten groups, each selecting ten.
pub const HYBRID_INDIVIDUAL_SESSIONS: usize = 40;
pub const HYBRID_IDEAS_PER_INDIVIDUAL: usize = 30;
pub const HYBRID_GROUP_SIZE: usize = 4;
pub const HYBRID_GROUPS: usize = HYBRID_INDIVIDUAL_SESSIONS / HYBRID_GROUP_SIZE;
pub const HYBRID_IDEAS_PER_GROUP: usize = 10;

/// Sessions failing to parse at least this fraction of the requested ideas
/// abort with a short-output error.
const MIN_PARSE_FRACTION: f64 = 0.9;

const MAX_CONTINUATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub request: ChatRequest,
    pub response: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranscriptRole {
    Session,
    HybridIndividual { participant: usize },
    HybridGroup { group: usize },
}

/// Complete audit record of one session: enough to rebuild its pool without
/// touching an endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub strategy: StrategySpec,
    pub session_index: usize,
    pub created_at: u64,
    pub endpoint_label: String,
    pub role: TranscriptRole,
    pub target_total: Option<usize>,
    pub exchanges: Vec<Exchange>,
}

impl SessionTranscript {
    fn new(strategy: &StrategySpec, session_index: usize, created_at: u64, endpoint_label: String) -> Self {
        Self {
            strategy: strategy.clone(),
            session_index,
            created_at,
            endpoint_label,
            role: TranscriptRole::Session,
            target_total: None,
            exchanges: Vec::new(),
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), GenError> {
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let json = serde_json::to_string_pretty(self).map_err(|e| GenError::Catalog(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, GenError> {
        let json = std::fs::read_to_string(path)?;
        serde_json::from_str(&json).map_err(|e| GenError::Parse(format!("{}: {e}", path.display())))
    }
}

fn short_output(expected: usize, parsed: usize) -> bool {
    (parsed as f64) < MIN_PARSE_FRACTION * (expected as f64)
}

fn base_pool(strategy: &StrategySpec, created_at: u64, endpoint_label: &str, session_index: usize) -> Pool {
    let mut pool = Pool::new(strategy.id.clone(), created_at);
    pool.provenance.insert("pipeline".to_string(), strategy.pipeline.to_string());
    pool.provenance.insert("model".to_string(), strategy.params.model_name.clone());
    pool.provenance.insert("temperature".to_string(), strategy.params.temperature.to_string());
    pool.provenance.insert("top_p".to_string(), strategy.params.top_p.to_string());
    pool.provenance.insert("endpoint".to_string(), endpoint_label.to_string());
    pool.provenance.insert("session".to_string(), session_index.to_string());
    pool
}

fn push_ideas(pool: &mut Pool, strategy_id: &str, session_index: usize, pairs: &[(String, String)]) {
    for (index, (name, description)) in pairs.iter().enumerate() {
        pool.ideas.push(Idea {
            id: Idea::position_id(strategy_id, session_index, index),
            name: name.clone(),
            description: description.clone(),
            raw_text: format!("{name}: {description}"),
            strategy_id: strategy_id.to_string(),
            session_index,
            idea_index: index,
        });
    }
}

fn request_for(strategy: &StrategySpec, messages: Vec<ChatMessage>) -> ChatRequest {
    ChatRequest {
        model: strategy.params.model_name.clone(),
        messages,
        temperature: strategy.params.temperature,
        top_p: strategy.params.top_p,
    }
}

/// One request with the strategy prompt; the whole idea list arrives in a
/// single response.
pub fn run_single_shot(
    strategy: &StrategySpec,
    endpoint: &dyn ChatEndpoint,
    session_index: usize,
    created_at: u64,
) -> Result<(Pool, SessionTranscript), GenError> {
    if strategy.pipeline != PipelineKind::SingleShot {
        return Err(GenError::Input(format!("strategy {} is not single-shot", strategy.id)));
    }
    let prompt = strategy.prompt.single()?;
    let mut transcript = SessionTranscript::new(strategy, session_index, created_at, endpoint.label());

    let request = request_for(strategy, vec![ChatMessage::user(prompt)]);
    let response = endpoint.complete(&request)?;
    transcript.exchanges.push(Exchange { request, response });

    let pool = assemble_single_shot(&transcript)?;
    Ok((pool, transcript))
}

fn assemble_single_shot(transcript: &SessionTranscript) -> Result<Pool, GenError> {
    let strategy = &transcript.strategy;
    let expected = strategy.ideas_per_session;
    let parsed = parse_idea_list(&transcript.exchanges[0].response, ParseMode::Lenient)?;
    if short_output(expected, parsed.ideas.len()) {
        return Err(GenError::ShortOutput {
            expected,
            parsed: parsed.ideas.len(),
            transcript: Box::new(transcript.clone()),
        });
    }
    let mut pairs = parsed.ideas;
    pairs.truncate(expected);
    let mut pool = base_pool(strategy, transcript.created_at, &transcript.endpoint_label, transcript.session_index);
    push_ideas(&mut pool, &strategy.id, transcript.session_index, &pairs);
    Ok(pool)
}

/// Requests ideas in chunks that keep the full prior conversation, restating
/// the target market between chunks, until `target_total` ideas arrive.
pub fn run_chunked(
    strategy: &StrategySpec,
    endpoint: &dyn ChatEndpoint,
    session_index: usize,
    target_total: usize,
    created_at: u64,
) -> Result<(Pool, SessionTranscript), GenError> {
    if !matches!(strategy.pipeline, PipelineKind::Chunked | PipelineKind::SingleShot) {
        return Err(GenError::Input(format!("strategy {} cannot run chunked", strategy.id)));
    }
    let chunk = strategy.chunk_size;
    if target_total < chunk {
        return Err(GenError::Input(format!(
            "target {target_total} is smaller than the chunk size {chunk}"
        )));
    }
    let prompt = strategy.prompt.single()?;
    let mut transcript = SessionTranscript::new(strategy, session_index, created_at, endpoint.label());
    transcript.target_total = Some(target_total);

    let mut messages: Vec<ChatMessage> = Vec::new();
    let mut collected = 0_usize;
    while collected < target_total {
        let ask = chunk.min(target_total - collected);
        let content = if messages.is_empty() {
            format!(
                "{prompt}\n\nProduce the ideas in increments for this session: \
                 please provide the first {ask} ideas now."
            )
        } else {
            format!(
                "Please continue with the next {ask} ideas (ideas {}-{} overall). \
                 Remember the requirements: the product targets college students in the \
                 United States, must be a physical good, not a service or software, and \
                 should retail for less than about USD 50.",
                collected + 1,
                collected + ask
            )
        };
        messages.push(ChatMessage::user(content));
        let request = request_for(strategy, messages.clone());
        let response = endpoint.complete(&request)?;
        messages.push(ChatMessage::assistant(response.clone()));
        transcript.exchanges.push(Exchange { request, response });

        let parsed = parse_idea_list(&transcript.exchanges.last().unwrap().response, ParseMode::Lenient)?;
        if short_output(ask, parsed.ideas.len()) {
            return Err(GenError::ShortOutput {
                expected: ask,
                parsed: parsed.ideas.len(),
                transcript: Box::new(transcript.clone()),
            });
        }
        collected += parsed.ideas.len().min(ask);
    }

    let pool = assemble_chunked(&transcript)?;
    Ok((pool, transcript))
}

fn assemble_chunked(transcript: &SessionTranscript) -> Result<Pool, GenError> {
    let strategy = &transcript.strategy;
    let target = transcript
        .target_total
        .ok_or_else(|| GenError::Parse("chunked transcript lacks a target".to_string()))?;
    let mut pairs = Vec::new();
    for exchange in &transcript.exchanges {
        let parsed = parse_idea_list(&exchange.response, ParseMode::Lenient)?;
        pairs.extend(parsed.ideas);
    }
    pairs.truncate(target);
    let mut pool = base_pool(strategy, transcript.created_at, &transcript.endpoint_label, transcript.session_index);
    pool.provenance.insert("target_total".to_string(), target.to_string());
    push_ideas(&mut pool, &strategy.id, transcript.session_index, &pairs);
    Ok(pool)
}

/// Issues the staged prompt (titles, boldness revision, full descriptions)
/// and keeps the conversation going until the final list is complete. The
/// returned flag reports whether a distinct revision pass was detected;
/// exclusion stays a manual decision.
pub fn run_chain_of_thought(
    strategy: &StrategySpec,
    endpoint: &dyn ChatEndpoint,
    session_index: usize,
    created_at: u64,
) -> Result<(Pool, SessionTranscript, bool), GenError> {
    if strategy.pipeline != PipelineKind::ChainOfThought {
        return Err(GenError::Input(format!("strategy {} is not chain-of-thought", strategy.id)));
    }
    let prompt = strategy.prompt.single()?;
    let expected = strategy.ideas_per_session;
    let mut transcript = SessionTranscript::new(strategy, session_index, created_at, endpoint.label());

    let mut messages = vec![ChatMessage::user(prompt)];
    let mut parsed_total = 0_usize;
    for round in 0..=MAX_CONTINUATIONS {
        if round > 0 {
            let remaining = expected - parsed_total;
            messages.push(ChatMessage::user(format!(
                "Please continue with the remaining {remaining} ideas (names and descriptions)."
            )));
        }
        let request = request_for(strategy, messages.clone());
        let response = endpoint.complete(&request)?;
        messages.push(ChatMessage::assistant(response.clone()));
        transcript.exchanges.push(Exchange { request, response });

        let parsed = parse_idea_list(&transcript.exchanges.last().unwrap().response, ParseMode::Lenient)?;
        if parsed.ideas.is_empty() {
            break;
        }
        parsed_total += parsed.ideas.len();
        if parsed_total >= expected {
            break;
        }
    }

    let (pool, compliance) = assemble_chain_of_thought(&transcript)?;
    Ok((pool, transcript, compliance))
}

fn assemble_chain_of_thought(transcript: &SessionTranscript) -> Result<(Pool, bool), GenError> {
    let strategy = &transcript.strategy;
    let expected = strategy.ideas_per_session;
    let mut pairs = Vec::new();
    let mut full_text = String::new();
    for exchange in &transcript.exchanges {
        let parsed = parse_idea_list(&exchange.response, ParseMode::Lenient)?;
        pairs.extend(parsed.ideas);
        full_text.push_str(&exchange.response);
        full_text.push('\n');
    }
    if short_output(expected, pairs.len()) {
        return Err(GenError::ShortOutput {
            expected,
            parsed: pairs.len(),
            transcript: Box::new(transcript.clone()),
        });
    }
    pairs.truncate(expected);
    let compliance = detect_revision_pass(&full_text);
    let mut pool = base_pool(strategy, transcript.created_at, &transcript.endpoint_label, transcript.session_index);
    pool.provenance.insert("step_compliance".to_string(), compliance.to_string());
    push_ideas(&mut pool, &strategy.id, transcript.session_index, &pairs);
    Ok((pool, compliance))
}

/// Runs forty individual thirty-idea sessions, teams them into ten groups
/// of four, and asks each group for its top ten. The final pool concatenates
/// the group selections; an idea's session index is its group.
pub fn run_hybrid(
    strategy: &StrategySpec,
    endpoint: &dyn ChatEndpoint,
    created_at: u64,
) -> Result<(Pool, Vec<SessionTranscript>), GenError> {
    if strategy.pipeline != PipelineKind::Hybrid {
        return Err(GenError::Input(format!("strategy {} is not hybrid", strategy.id)));
    }
    let (individual_prompt, group_prompt) = strategy.prompt.hybrid()?;
    let mut transcripts: Vec<SessionTranscript> = Vec::new();
    let mut member_ideas: Vec<Vec<(String, String)>> = Vec::new();

    for participant in 0..HYBRID_INDIVIDUAL_SESSIONS {
        let mut transcript = SessionTranscript::new(strategy, participant, created_at, endpoint.label());
        transcript.role = TranscriptRole::HybridIndividual { participant };
        let request = request_for(strategy, vec![ChatMessage::user(individual_prompt)]);
        let response = match endpoint.complete(&request) {
            Ok(r) => r,
            Err(e) => {
                return Err(GenError::HybridAborted {
                    message: format!("individual session {participant}: {e}"),
                    transcripts,
                });
            }
        };
        transcript.exchanges.push(Exchange { request, response });

        let parsed = parse_idea_list(&transcript.exchanges[0].response, ParseMode::Lenient)?;
        if short_output(HYBRID_IDEAS_PER_INDIVIDUAL, parsed.ideas.len()) {
            transcripts.push(transcript);
            return Err(GenError::HybridAborted {
                message: format!(
                    "individual session {participant} delivered {} of {HYBRID_IDEAS_PER_INDIVIDUAL} ideas",
                    parsed.ideas.len()
                ),
                transcripts,
            });
        }
        let mut pairs = parsed.ideas;
        pairs.truncate(HYBRID_IDEAS_PER_INDIVIDUAL);
        member_ideas.push(pairs);
        transcripts.push(transcript);
    }

    let mut pool = base_pool(strategy, created_at, &endpoint.label(), 0);
    pool.provenance.insert("stage1_sessions".to_string(), HYBRID_INDIVIDUAL_SESSIONS.to_string());
    pool.provenance.insert("groups".to_string(), HYBRID_GROUPS.to_string());
    for group in 0..HYBRID_GROUPS {
        let mut transcript = SessionTranscript::new(strategy, group, created_at, endpoint.label());
        transcript.role = TranscriptRole::HybridGroup { group };

        // Member ideas are presented labeled only by number, never by the
        // session they came from.
        let mut block = String::new();
        let mut number = 0;
        for member in &member_ideas[group * HYBRID_GROUP_SIZE..(group + 1) * HYBRID_GROUP_SIZE] {
            for (name, description) in member {
                number += 1;
                block.push_str(&format!("{number}. {name}: {description}\n"));
            }
        }
        let content = group_prompt.replace("<ideas>", &block);
        let request = request_for(strategy, vec![ChatMessage::user(content)]);
        let response = match endpoint.complete(&request) {
            Ok(r) => r,
            Err(e) => {
                return Err(GenError::HybridAborted {
                    message: format!("group {group}: {e}"),
                    transcripts,
                });
            }
        };
        transcript.exchanges.push(Exchange { request, response });

        let parsed = parse_idea_list(&transcript.exchanges[0].response, ParseMode::Lenient)?;
        if parsed.ideas.len() != HYBRID_IDEAS_PER_GROUP {
            return Err(GenError::GroupOutput {
                group,
                got: parsed.ideas.len(),
                expected: HYBRID_IDEAS_PER_GROUP,
                transcript: Box::new(transcript),
            });
        }
        for (offset, (name, description)) in parsed.ideas.iter().enumerate() {
            pool.ideas.push(Idea {
                id: Idea::position_id(&strategy.id, group, offset),
                name: name.clone(),
                description: description.clone(),
                raw_text: format!("{name}: {description}"),
                strategy_id: strategy.id.clone(),
                session_index: group,
                idea_index: offset,
            });
        }
        transcripts.push(transcript);
    }

    Ok((pool, transcripts))
}

#[derive(Debug)]
pub struct SessionFailure {
    pub session_index: usize,
    pub message: String,
}

/// Everything a campaign produced: pools for the sessions that succeeded,
/// all transcripts, and a failure summary for the sessions that did not.
#[derive(Debug, Default)]
pub struct CampaignOutcome {
    pub pools: Vec<Pool>,
    pub transcripts: Vec<SessionTranscript>,
    pub failures: Vec<SessionFailure>,
}

/// Runs the strategy's pipeline for each of its sessions. Per-session
/// failures are recorded and the campaign continues.
pub fn run_campaign(
    strategy: &StrategySpec,
    endpoint: &dyn ChatEndpoint,
    created_at: u64,
) -> Result<CampaignOutcome, GenError> {
    if strategy.n_sessions == 0 {
        return Err(GenError::Input("campaign needs at least one session".to_string()));
    }
    let mut outcome = CampaignOutcome::default();
    for session in 0..strategy.n_sessions {
        let result: Result<(Pool, Vec<SessionTranscript>), GenError> = match strategy.pipeline {
            PipelineKind::SingleShot => run_single_shot(strategy, endpoint, session, created_at)
                .map(|(pool, t)| (pool, vec![t])),
            PipelineKind::Chunked => {
                run_chunked(strategy, endpoint, session, strategy.ideas_per_session, created_at)
                    .map(|(pool, t)| (pool, vec![t]))
            }
            PipelineKind::ChainOfThought => run_chain_of_thought(strategy, endpoint, session, created_at)
                .map(|(pool, t, _)| (pool, vec![t])),
            PipelineKind::Hybrid => run_hybrid(strategy, endpoint, created_at).map(|(mut pool, mut t)| {
                pool.provenance.insert("session".to_string(), session.to_string());
                // Participant/group are carried by the role; session_index
                // tracks the campaign session so transcript names stay unique.
                for transcript in &mut t {
                    transcript.session_index = session;
                }
                (pool, t)
            }),
        };
        match result {
            Ok((pool, transcripts)) => {
                outcome.pools.push(pool);
                outcome.transcripts.extend(transcripts);
            }
            Err(e) => outcome.failures.push(SessionFailure {
                session_index: session,
                message: e.to_string(),
            }),
        }
    }
    Ok(outcome)
}

/// Rebuilds a session's pool purely from its stored responses. For
/// chain-of-thought sessions the returned flag is the revision-pass check;
/// other pipelines report true.
pub fn replay_session(transcript: &SessionTranscript) -> Result<(Pool, bool), GenError> {
    // Chunked runs are marked by their target, whatever the catalog
    // pipeline of the strategy they borrowed.
    if transcript.target_total.is_some() {
        return Ok((assemble_chunked(transcript)?, true));
    }
    match transcript.strategy.pipeline {
        PipelineKind::SingleShot | PipelineKind::Chunked => {
            Ok((assemble_single_shot(transcript)?, true))
        }
        PipelineKind::ChainOfThought => assemble_chain_of_thought(transcript),
        PipelineKind::Hybrid => Err(GenError::Input(
            "hybrid pools replay from the full transcript set; use replay_hybrid".to_string(),
        )),
    }
}

/// Rebuilds a hybrid pool from its group-selection transcripts.
pub fn replay_hybrid(transcripts: &[SessionTranscript]) -> Result<Pool, GenError> {
    let mut groups: Vec<&SessionTranscript> = transcripts
        .iter()
        .filter(|t| matches!(t.role, TranscriptRole::HybridGroup { .. }))
        .collect();
    groups.sort_by_key(|t| match t.role {
        TranscriptRole::HybridGroup { group } => group,
        _ => unreachable!(),
    });
    if groups.len() != HYBRID_GROUPS {
        return Err(GenError::Input(format!(
            "expected {HYBRID_GROUPS} group transcripts, found {}",
            groups.len()
        )));
    }
    let strategy = &groups[0].strategy;
    let mut pool = base_pool(
        strategy,
        groups[0].created_at,
        &groups[0].endpoint_label,
        groups[0].session_index,
    );
    pool.provenance.insert("stage1_sessions".to_string(), HYBRID_INDIVIDUAL_SESSIONS.to_string());
    pool.provenance.insert("groups".to_string(), HYBRID_GROUPS.to_string());
    for transcript in groups {
        let group = match transcript.role {
            TranscriptRole::HybridGroup { group } => group,
            _ => unreachable!(),
        };
        let parsed = parse_idea_list(&transcript.exchanges[0].response, ParseMode::Lenient)?;
        if parsed.ideas.len() != HYBRID_IDEAS_PER_GROUP {
            return Err(GenError::GroupOutput {
                group,
                got: parsed.ideas.len(),
                expected: HYBRID_IDEAS_PER_GROUP,
                transcript: Box::new(transcript.clone()),
            });
        }
        for (offset, (name, description)) in parsed.ideas.iter().enumerate() {
            pool.ideas.push(Idea {
                id: Idea::position_id(&strategy.id, group, offset),
                name: name.clone(),
                description: description.clone(),
                raw_text: format!("{name}: {description}"),
                strategy_id: strategy.id.clone(),
                session_index: group,
                idea_index: offset,
            });
        }
    }
    Ok(pool)
}
