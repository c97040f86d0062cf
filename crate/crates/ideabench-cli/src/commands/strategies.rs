//! strategies: list the catalog.

use crate::support::{CliError, Context};

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let catalog = ctx.catalog()?;
    println!("{:<44} {:<17} {:>9} {:<22} label", "id", "pipeline", "sessions", "model");
    for strategy in catalog.iter() {
        println!(
            "{:<44} {:<17} {:>4}x{:<4} {:<22} {}",
            strategy.id,
            strategy.pipeline.to_string(),
            strategy.n_sessions,
            strategy.ideas_per_session,
            strategy.params.model_name,
            strategy.label
        );
    }
    println!("{} strategies", catalog.len());
    Ok(())
}
