//! compare: resampling significance tests on per-idea mean similarity
//! between two pool sets.

use std::path::PathBuf;

use ideabench::embedding::EmbeddedPool;
use ideabench::stats::{bootstrap_test, per_idea_mean_similarity, permutation_test, TestResult};

use crate::support::{embed_pools, load_pools, CliError, Context};

pub fn run(
    ctx: &Context,
    set_a: &[PathBuf],
    set_b: &[PathBuf],
    method: &str,
    resamples: usize,
) -> Result<(), CliError> {
    if !matches!(method, "permutation" | "bootstrap" | "both") {
        return Err(CliError::usage(format!(
            "unknown method {method:?}; use permutation, bootstrap, or both"
        )));
    }
    let embedder = ctx.embedder()?;
    let a = collect_units(&embed_pools(&embedder, load_pools(set_a)?, true)?)?;
    let b = collect_units(&embed_pools(&embedder, load_pools(set_b)?, true)?)?;

    let mut results: Vec<TestResult> = Vec::new();
    if matches!(method, "permutation" | "both") {
        results.push(
            permutation_test(&a, &b, resamples, ctx.seed)
                .map_err(|e| CliError::analysis(e.to_string()))?,
        );
    }
    if matches!(method, "bootstrap" | "both") {
        results.push(
            bootstrap_test(&a, &b, resamples, ctx.seed)
                .map_err(|e| CliError::analysis(e.to_string()))?,
        );
    }
    for result in &results {
        println!(
            "method={} statistic={:.6} p_value={:.6} resamples={} seed={}",
            result.method, result.statistic, result.p_value, result.n_resamples, result.seed
        );
    }
    println!(
        "note: cosine-similarity differences are hard to interpret; statistical significance \
         suggests a technique may help, it does not endorse a strategy outright."
    );
    Ok(())
}

/// Per-idea mean similarity within each pool, concatenated across the set.
fn collect_units(pools: &[EmbeddedPool]) -> Result<Vec<f64>, CliError> {
    if pools.is_empty() {
        return Err(CliError::usage("pool set is empty".to_string()));
    }
    let mut units = Vec::new();
    for pool in pools {
        units.extend(
            per_idea_mean_similarity(pool).map_err(|e| CliError::usage(e.to_string()))?,
        );
    }
    Ok(units)
}
