//! common: cluster near-duplicate ideas across pools and print the largest
//! clusters as "<count> / <total>: <representative name>".

use std::path::PathBuf;

use ideabench::diversity::{most_common_ideas, DedupConfig};

use crate::support::{embed_pools, load_pools, CliError, Context};

pub fn run(ctx: &Context, pool_paths: &[PathBuf], threshold: f64, top_k: usize) -> Result<(), CliError> {
    let embedder = ctx.embedder()?;
    let embedded = embed_pools(&embedder, load_pools(pool_paths)?, true)?;
    let total: usize = embedded.iter().map(|p| p.len()).sum();
    let clusters = most_common_ideas(&embedded, DedupConfig { threshold })
        .map_err(|e| CliError::usage(e.to_string()))?;
    for (idea, count) in clusters.iter().take(top_k) {
        println!("{count} / {total}: {}", idea.name);
    }
    Ok(())
}
