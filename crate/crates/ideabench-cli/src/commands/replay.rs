//! replay: rebuild pools from stored transcripts, without any endpoint.
//! Hybrid group transcripts are reassembled into their single pool.

use std::path::PathBuf;

use ideabench::generation::{replay_hybrid, replay_session, SessionTranscript, TranscriptRole};
use ideabench::model::save_pool;

use crate::manifest::ManifestBuilder;
use crate::support::{CliError, Context};

pub fn run(ctx: &Context, transcript_paths: &[PathBuf]) -> Result<(), CliError> {
    let mut sessions = Vec::new();
    let mut hybrid_parts = Vec::new();
    for path in transcript_paths {
        let transcript = SessionTranscript::load(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        match transcript.role {
            TranscriptRole::Session => sessions.push(transcript),
            TranscriptRole::HybridIndividual { .. } | TranscriptRole::HybridGroup { .. } => {
                hybrid_parts.push(transcript)
            }
        }
    }

    let out_dir = ctx.out_dir();
    let mut manifest = ManifestBuilder::new(serde_json::json!({ "command": "replay" }));
    for path in transcript_paths {
        manifest.input(path);
    }

    let mut written = 0;
    for transcript in &sessions {
        let (pool, compliance) = replay_session(transcript).map_err(|e| CliError::analysis(e.to_string()))?;
        let path = out_dir.join("pools").join(format!(
            "{}-s{:0>3}.jsonl",
            transcript.strategy.id, transcript.session_index
        ));
        save_pool(&pool, &path).map_err(|e| CliError::analysis(format!("{}: {e}", path.display())))?;
        manifest.output(&path);
        written += 1;
        if transcript.strategy.pipeline == ideabench::generation::PipelineKind::ChainOfThought {
            println!("replayed {} (step compliance: {compliance})", path.display());
        } else {
            println!("replayed {}", path.display());
        }
    }

    if !hybrid_parts.is_empty() {
        let pool = replay_hybrid(&hybrid_parts).map_err(|e| CliError::analysis(e.to_string()))?;
        let path = out_dir.join("pools").join(format!("{}-hybrid.jsonl", pool.strategy_id));
        save_pool(&pool, &path).map_err(|e| CliError::analysis(format!("{}: {e}", path.display())))?;
        manifest.output(&path);
        written += 1;
        println!("replayed {}", path.display());
    }

    manifest.write(&out_dir)?;
    println!("{written} pools rebuilt from {} transcripts", transcript_paths.len());
    Ok(())
}
