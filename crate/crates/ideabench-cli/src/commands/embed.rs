//! embed: run every pool through the configured provider, warming the
//! vector cache for later analysis commands.

use std::path::PathBuf;

use crate::support::{embed_pools, load_pools, CliError, Context};

pub fn run(ctx: &Context, pool_paths: &[PathBuf]) -> Result<(), CliError> {
    let embedder = ctx.embedder()?;
    let pools = load_pools(pool_paths)?;
    let embedded = embed_pools(&embedder, pools, false)?;
    for pool in &embedded {
        println!(
            "embedded {} ({} ideas) with {}",
            pool.pool.strategy_id,
            pool.len(),
            pool.provider
        );
    }
    let stats = embedder.stats();
    println!(
        "{} pools embedded; {} cache hits, {} provider calls",
        embedded.len(),
        stats.cache_hits,
        stats.provider_calls
    );
    Ok(())
}
