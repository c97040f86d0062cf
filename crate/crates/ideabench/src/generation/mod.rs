//! Idea generation: the bundled strategy catalog, chat endpoint clients,
//! the four pipelines (single-shot, chunked, chain-of-thought, hybrid
//! brainstorming), and the idea-list parser.

pub mod endpoint;
pub mod mock;
pub mod parser;
pub mod pipeline;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelParams;

pub use endpoint::{ChatEndpoint, ChatMessage, ChatRequest, HttpChatEndpoint, Role, LLM_API_KEY_VAR, LLM_URL_VAR};
pub use mock::MockEndpoint;
pub use parser::{parse_idea_list, ParseMode, ParsedIdeas};
pub use pipeline::{
    replay_hybrid, replay_session, run_campaign, run_chain_of_thought, run_chunked, run_hybrid,
    run_single_shot, CampaignOutcome, Exchange, SessionTranscript, TranscriptRole,
};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("input error: {0}")]
    Input(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("provider error: {0}")]
    Provider(String),
    #[error("short output: parsed {parsed} of {expected} requested ideas")]
    ShortOutput {
        expected: usize,
        parsed: usize,
        transcript: Box<SessionTranscript>,
    },
    #[error("group {group} returned {got} ideas instead of {expected}")]
    GroupOutput {
        group: usize,
        got: usize,
        expected: usize,
        transcript: Box<SessionTranscript>,
    },
    #[error("hybrid run aborted: {message}")]
    HybridAborted {
        message: String,
        transcripts: Vec<SessionTranscript>,
    },
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    SingleShot,
    Chunked,
    ChainOfThought,
    Hybrid,
}

impl std::fmt::Display for PipelineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            PipelineKind::SingleShot => "single_shot",
            PipelineKind::Chunked => "chunked",
            PipelineKind::ChainOfThought => "chain_of_thought",
            PipelineKind::Hybrid => "hybrid",
        };
        write!(f, "{name}")
    }
}

/// Prompt text for a strategy: one prompt, or the two-stage pair used by
/// hybrid brainstorming.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PromptSpec {
    Single(String),
    Hybrid { individual: String, group: String },
}

impl PromptSpec {
    pub fn single(&self) -> Result<&str, GenError> {
        match self {
            PromptSpec::Single(text) => Ok(text),
            PromptSpec::Hybrid { .. } => {
                Err(GenError::Input("strategy carries a two-stage prompt".to_string()))
            }
        }
    }

    pub fn hybrid(&self) -> Result<(&str, &str), GenError> {
        match self {
            PromptSpec::Hybrid { individual, group } => Ok((individual, group)),
            PromptSpec::Single(_) => {
                Err(GenError::Input("strategy carries a single prompt".to_string()))
            }
        }
    }
}

fn default_ideas_per_session() -> usize {
    100
}

fn default_n_sessions() -> usize {
    10
}

fn default_chunk_size() -> usize {
    30
}

/// A prompt strategy: pipeline kind, prompt text, sampling parameters, and
/// session sizing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub id: String,
    pub label: String,
    pub pipeline: PipelineKind,
    pub prompt: PromptSpec,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default = "default_ideas_per_session")]
    pub ideas_per_session: usize,
    #[serde(default = "default_n_sessions")]
    pub n_sessions: usize,
    #[serde(default = "default_chunk_size")]
    pub chunk_size: usize,
}

impl StrategySpec {
    fn validate(&self) -> Result<(), GenError> {
        let prompt_matches = matches!(
            (&self.pipeline, &self.prompt),
            (PipelineKind::Hybrid, PromptSpec::Hybrid { .. })
                | (PipelineKind::SingleShot, PromptSpec::Single(_))
                | (PipelineKind::Chunked, PromptSpec::Single(_))
                | (PipelineKind::ChainOfThought, PromptSpec::Single(_))
        );
        if !prompt_matches {
            return Err(GenError::Catalog(format!(
                "strategy {}: prompt shape does not fit pipeline {}",
                self.id, self.pipeline
            )));
        }
        if self.chunk_size == 0 || self.ideas_per_session == 0 {
            return Err(GenError::Catalog(format!("strategy {}: zero-sized session", self.id)));
        }
        if self.params.temperature < 0.0 {
            return Err(GenError::Catalog(format!("strategy {}: negative temperature", self.id)));
        }
        if !(self.params.top_p > 0.0 && self.params.top_p <= 1.0) {
            return Err(GenError::Catalog(format!("strategy {}: top_p outside (0, 1]", self.id)));
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct CatalogFile {
    strategies: Vec<StrategySpec>,
}

/// The strategy catalog: the bundled prompt set, or a user-supplied file of
/// the same shape.
#[derive(Debug, Clone)]
pub struct StrategyCatalog {
    strategies: Vec<StrategySpec>,
}

const BUNDLED_CATALOG: &str = include_str!("../../data/catalog.json");

impl StrategyCatalog {
    /// The built-in catalog of prompting strategies.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_CATALOG).expect("bundled catalog is valid")
    }

    pub fn from_json(json: &str) -> Result<Self, GenError> {
        let file: CatalogFile =
            serde_json::from_str(json).map_err(|e| GenError::Catalog(e.to_string()))?;
        let mut seen = std::collections::HashSet::new();
        for strategy in &file.strategies {
            strategy.validate()?;
            if !seen.insert(strategy.id.as_str()) {
                return Err(GenError::Catalog(format!("duplicate strategy id {}", strategy.id)));
            }
        }
        Ok(Self {
            strategies: file.strategies,
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, GenError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, id: &str) -> Option<&StrategySpec> {
        self.strategies.iter().find(|s| s.id == id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &StrategySpec> {
        self.strategies.iter()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.strategies.iter().map(|s| s.id.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_catalog_has_thirty_five_strategies() {
        let catalog = StrategyCatalog::bundled();
        assert_eq!(catalog.len(), 35);
    }

    #[test]
    fn bundled_catalog_ids_are_unique_and_pipelines_consistent() {
        // Constructing the catalog runs validation on every entry.
        let catalog = StrategyCatalog::bundled();
        assert!(catalog.get("base_prompt").is_some());
        assert!(catalog.get("chain_of_thought").is_some());
        assert!(catalog.get("hybrid_brainstorming").is_some());
    }

    #[test]
    fn hybrid_strategy_carries_both_stage_prompts() {
        let catalog = StrategyCatalog::bundled();
        let hybrid = catalog.get("hybrid_brainstorming").unwrap();
        assert_eq!(hybrid.pipeline, PipelineKind::Hybrid);
        let (individual, group) = hybrid.prompt.hybrid().unwrap();
        assert!(individual.contains("generate 30 ideas"));
        assert!(group.contains("<ideas>"));
    }

    #[test]
    fn defaults_fill_in_session_sizing() {
        let json = r#"{"strategies":[{"id":"x","label":"X","pipeline":"single_shot","prompt":"Please generate 100 ideas"}]}"#;
        let catalog = StrategyCatalog::from_json(json).unwrap();
        let s = catalog.get("x").unwrap();
        assert_eq!(s.ideas_per_session, 100);
        assert_eq!(s.n_sessions, 10);
        assert_eq!(s.chunk_size, 30);
        assert_eq!(s.params.temperature, 0.7);
        assert_eq!(s.params.top_p, 1.0);
    }

    #[test]
    fn mismatched_prompt_shape_is_rejected() {
        let json = r#"{"strategies":[{"id":"x","label":"X","pipeline":"hybrid","prompt":"single text"}]}"#;
        assert!(StrategyCatalog::from_json(json).is_err());
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let json = r#"{"strategies":[
            {"id":"x","label":"X","pipeline":"single_shot","prompt":"a"},
            {"id":"x","label":"Y","pipeline":"single_shot","prompt":"b"}
        ]}"#;
        assert!(StrategyCatalog::from_json(json).is_err());
    }
}
