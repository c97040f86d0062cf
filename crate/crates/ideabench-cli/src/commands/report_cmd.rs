//! report: leaderboard CSV (mean within-pool cosine per strategy, most
//! diverse first), density CSV of all pairwise similarities, and the
//! between-strategy matrix over first-K truncation, each with an SVG plot.

use std::path::PathBuf;

use crate::manifest::ManifestBuilder;
use crate::report;
use crate::support::{embed_pools, load_pools, write_text, CliError, Context};
use crate::svg;

pub fn run(ctx: &Context, pool_paths: &[PathBuf], first_k: usize) -> Result<(), CliError> {
    let embedder = ctx.embedder()?;
    let pools = load_pools(pool_paths)?;
    let embedded = embed_pools(&embedder, pools, true)?;
    if embedded.is_empty() {
        return Err(CliError::usage("no pools left to report on".to_string()));
    }

    let out_dir = ctx.out_dir();
    let mut manifest = ManifestBuilder::new(serde_json::json!({
        "command": "report",
        "first_k": first_k,
        "embed_provider": ctx.embed_provider,
    }));
    for path in pool_paths {
        manifest.input(path);
    }

    let groups = report::group_by_strategy(&embedded);

    let rows = report::leaderboard(&groups)?;
    let leaderboard_csv = report::leaderboard_csv(&rows)?;
    let leaderboard_path = out_dir.join("leaderboard.csv");
    write_text(&leaderboard_path, &leaderboard_csv)?;
    manifest.output(&leaderboard_path);
    let bar_rows: Vec<(String, f64)> = rows
        .iter()
        .map(|r| (r.strategy_id.clone(), r.mean_within_pool_cosine))
        .collect();
    let leaderboard_svg_path = out_dir.join("leaderboard.svg");
    write_text(
        &leaderboard_svg_path,
        &svg::bar_chart("Mean within-pool cosine similarity (lower = more diverse)", &bar_rows),
    )?;
    manifest.output(&leaderboard_svg_path);

    let density = report::density_rows(&groups)?;
    let density_path = out_dir.join("density.csv");
    write_text(&density_path, &report::density_csv(&density)?)?;
    manifest.output(&density_path);
    let density_svg_path = out_dir.join("density.svg");
    write_text(
        &density_svg_path,
        &svg::density_chart("Idea similarity density by strategy", &density),
    )?;
    manifest.output(&density_svg_path);

    let (labels, matrix) = report::between_matrix(&groups, first_k)?;
    let between_path = out_dir.join("between_pools.csv");
    write_text(&between_path, &report::between_csv(&labels, &matrix)?)?;
    manifest.output(&between_path);
    let between_svg_path = out_dir.join("between_pools.svg");
    write_text(
        &between_svg_path,
        &svg::heatmap(
            &format!("Between-strategy cosine similarity (first {first_k} ideas)"),
            &labels,
            &matrix,
        ),
    )?;
    manifest.output(&between_svg_path);

    manifest.write(&out_dir)?;

    println!("leaderboard (most diverse first):");
    for row in &rows {
        println!(
            "  {:<40} {:.4}  ({} pools, {} ideas)",
            row.strategy_id, row.mean_within_pool_cosine, row.n_pools, row.n_ideas
        );
    }
    println!("wrote {}", out_dir.display());
    Ok(())
}
