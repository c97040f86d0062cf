//! estimate: per pool, the unique-idea count, repetition rate, and the
//! capture-recapture opportunity-space size; optionally the mean across
//! pools (strategies were run several times and averaged).

use std::path::PathBuf;

use ideabench::diversity::{count_unique, estimate_population, repetition_rate, DedupConfig, DiversityError};
use ideabench::model::load_pool;

use crate::support::{CliError, Context};

pub fn run(ctx: &Context, pool_paths: &[PathBuf], threshold: f64, per_run: bool) -> Result<(), CliError> {
    let embedder = ctx.embedder()?;
    let config = DedupConfig { threshold };
    let mut estimates = Vec::new();

    for path in pool_paths {
        let pool = load_pool(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        if pool.excluded {
            println!("{}: excluded, skipped", path.display());
            continue;
        }
        let embedded = embedder
            .embed_pool(&pool)
            .map_err(|e| CliError::analysis(e.to_string()))?;
        let report = count_unique(&embedded, config).map_err(|e| CliError::usage(e.to_string()))?;
        let rate = repetition_rate(&report);
        match estimate_population(report.total, report.unique) {
            Ok(estimate) => {
                println!(
                    "{}: N={} U={} repetition={:.1}% T={:.0}",
                    path.display(),
                    report.total,
                    report.unique,
                    rate * 100.0,
                    estimate.space_size
                );
                estimates.push(estimate.space_size);
            }
            Err(DiversityError::InsufficientDuplicates { .. }) => {
                println!(
                    "{}: N={} U={} repetition={:.1}% T=unbounded (no duplicates observed)",
                    path.display(),
                    report.total,
                    report.unique,
                    rate * 100.0
                );
            }
            Err(e) => return Err(CliError::analysis(e.to_string())),
        }
    }

    if per_run && !estimates.is_empty() {
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        println!("mean T across {} pools: {mean:.0}", estimates.len());
    }
    Ok(())
}
