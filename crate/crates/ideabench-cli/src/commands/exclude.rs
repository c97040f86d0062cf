//! exclude: set or clear a pool's manual-exclusion flag. Exclusion is an
//! operator judgment; aggregate statistics skip flagged pools.

use std::path::Path;

use ideabench::model::{load_pool, save_pool};

use crate::support::CliError;

pub fn run(pool_path: &Path, clear: bool) -> Result<(), CliError> {
    let mut pool = load_pool(pool_path)
        .map_err(|e| CliError::usage(format!("{}: {e}", pool_path.display())))?;
    pool.excluded = !clear;
    save_pool(&pool, pool_path)
        .map_err(|e| CliError::analysis(format!("{}: {e}", pool_path.display())))?;
    println!(
        "{}: excluded = {}",
        pool_path.display(),
        pool.excluded
    );
    Ok(())
}
