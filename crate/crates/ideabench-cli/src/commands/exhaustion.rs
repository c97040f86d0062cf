//! exhaustion: per-idea max similarity to all prior ideas, smoothed, as a
//! CSV (idea_number, raw_max_sim, smoothed) plus a line chart.

use std::path::{Path, PathBuf};

use ideabench::diversity::exhaustion_curve;
use ideabench::model::load_pool;

use crate::manifest::ManifestBuilder;
use crate::support::{write_text, CliError, Context};
use crate::svg;

pub fn run(ctx: &Context, pool_path: &Path, alpha: f64, first_n: Option<usize>) -> Result<(), CliError> {
    let pool = load_pool(pool_path).map_err(|e| CliError::usage(format!("{}: {e}", pool_path.display())))?;
    if pool.len() < 2 {
        return Err(CliError::usage(format!(
            "exhaustion needs at least 2 ideas, pool has {}",
            pool.len()
        )));
    }
    let embedder = ctx.embedder()?;
    let embedded = embedder
        .embed_pool(&pool)
        .map_err(|e| CliError::analysis(e.to_string()))?;
    let series = exhaustion_curve(&embedded, alpha).map_err(|e| CliError::usage(e.to_string()))?;

    // Rows cover ideas 2..=min(first_n, n); entry k describes idea k+2.
    let limit = first_n.unwrap_or(pool.len()).min(pool.len());
    let rows = limit.saturating_sub(1);

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["idea_number", "raw_max_sim", "smoothed"])
        .map_err(|e| CliError::analysis(format!("csv: {e}")))?;
    for k in 0..rows {
        writer
            .write_record([
                (k + 2).to_string(),
                format!("{:.6}", series.raw[k]),
                format!("{:.6}", series.smoothed[k]),
            ])
            .map_err(|e| CliError::analysis(format!("csv: {e}")))?;
    }
    let csv_bytes = writer
        .into_inner()
        .map_err(|e| CliError::analysis(format!("csv: {e}")))?;
    let csv_text = String::from_utf8(csv_bytes).map_err(|e| CliError::analysis(format!("csv: {e}")))?;

    let out_dir = ctx.out_dir();
    let csv_path = out_dir.join("exhaustion.csv");
    write_text(&csv_path, &csv_text)?;

    let raw_series: Vec<(f64, f64)> = (0..rows).map(|k| ((k + 2) as f64, series.raw[k])).collect();
    let smooth_series: Vec<(f64, f64)> = (0..rows).map(|k| ((k + 2) as f64, series.smoothed[k])).collect();
    let chart = svg::line_chart(
        &format!("Exhaustion curve for {} (alpha = {alpha})", pool.strategy_id),
        "ideas generated",
        "max cosine to prior ideas",
        &[
            ("raw".to_string(), raw_series),
            ("smoothed".to_string(), smooth_series),
        ],
    );
    let svg_path = out_dir.join("exhaustion.svg");
    write_text(&svg_path, &chart)?;

    let mut manifest = ManifestBuilder::new(serde_json::json!({
        "command": "exhaustion",
        "alpha": alpha,
        "first_n": first_n,
        "embed_provider": ctx.embed_provider,
    }));
    manifest.input(&PathBuf::from(pool_path));
    manifest.output(&csv_path);
    manifest.output(&svg_path);
    manifest.write(&out_dir)?;

    println!("wrote {} ({} rows)", csv_path.display(), rows);
    Ok(())
}
