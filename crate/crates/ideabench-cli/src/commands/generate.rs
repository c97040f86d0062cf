//! generate: run a strategy's campaign against the configured endpoint and
//! persist pools, transcripts, and a manifest.

use ideabench::generation::{
    run_campaign, ChatEndpoint, HttpChatEndpoint, MockEndpoint, PipelineKind, TranscriptRole,
};
use ideabench::model::save_pool;

use crate::manifest::ManifestBuilder;
use crate::support::{CliError, Context};

pub fn run(
    ctx: &Context,
    strategy_id: &str,
    sessions: Option<usize>,
    ideas: Option<usize>,
    chunked_total: Option<usize>,
) -> Result<(), CliError> {
    let catalog = ctx.catalog()?;
    let mut strategy = match catalog.get(strategy_id) {
        Some(s) => s.clone(),
        None => {
            return Err(CliError::usage(format!(
                "unknown strategy {strategy_id:?}; available: {}",
                catalog.ids().join(", ")
            )));
        }
    };
    if let Some(n) = sessions {
        strategy.n_sessions = n;
    }
    if let Some(n) = ideas {
        strategy.ideas_per_session = n;
    }
    if let Some(total) = chunked_total {
        if strategy.pipeline == PipelineKind::Hybrid {
            return Err(CliError::usage("hybrid strategies cannot run chunked"));
        }
        strategy.pipeline = PipelineKind::Chunked;
        strategy.ideas_per_session = total;
    }

    let mock_endpoint;
    let http_endpoint;
    let endpoint: &dyn ChatEndpoint = if ctx.mock {
        mock_endpoint = MockEndpoint::new(ctx.seed);
        &mock_endpoint
    } else {
        http_endpoint = HttpChatEndpoint::from_env().map_err(|e| CliError::usage(e.to_string()))?;
        &http_endpoint
    };

    let out_dir = ctx.out_dir();
    let mut manifest = ManifestBuilder::new(serde_json::json!({
        "command": "generate",
        "strategy": strategy.id,
        "pipeline": strategy.pipeline.to_string(),
        "n_sessions": strategy.n_sessions,
        "ideas_per_session": strategy.ideas_per_session,
        "mock": ctx.mock,
        "seed": ctx.seed,
    }));

    let outcome = run_campaign(&strategy, endpoint, ctx.created_at())
        .map_err(|e| CliError::usage(e.to_string()))?;

    for (i, pool) in outcome.pools.iter().enumerate() {
        let session = pool
            .provenance
            .get("session")
            .cloned()
            .unwrap_or_else(|| i.to_string());
        let path = out_dir.join("pools").join(format!("{}-s{:0>3}.jsonl", strategy.id, session));
        save_pool(pool, &path).map_err(|e| CliError::analysis(format!("{}: {e}", path.display())))?;
        manifest.output(&path);
        println!("wrote {} ({} ideas)", path.display(), pool.len());
    }
    for transcript in &outcome.transcripts {
        let suffix = match transcript.role {
            TranscriptRole::Session => format!("s{:0>3}", transcript.session_index),
            TranscriptRole::HybridIndividual { participant } => {
                format!("s{:0>3}-p{participant:0>3}", transcript.session_index)
            }
            TranscriptRole::HybridGroup { group } => {
                format!("s{:0>3}-g{group:0>2}", transcript.session_index)
            }
        };
        let path = out_dir
            .join("transcripts")
            .join(format!("{}-{}.json", strategy.id, suffix));
        transcript
            .save(&path)
            .map_err(|e| CliError::analysis(format!("{}: {e}", path.display())))?;
        manifest.output(&path);
    }

    for failure in &outcome.failures {
        eprintln!("session {} failed: {}", failure.session_index, failure.message);
    }
    println!(
        "campaign complete: {} pools, {} failures",
        outcome.pools.len(),
        outcome.failures.len()
    );
    manifest.write(&out_dir)?;

    if outcome.pools.is_empty() {
        return Err(CliError::analysis("every session failed".to_string()));
    }
    Ok(())
}
