//! simulate: calibrate the opportunity-space estimator against simulated
//! finite idea spaces of known size, emitting a calibration CSV.

use ideabench::simulation::{calibration_run, CalibrationConfig, Popularity};

use crate::manifest::ManifestBuilder;
use crate::support::{write_text, CliError, Context};

#[allow(clippy::too_many_arguments)]
pub fn run(
    ctx: &Context,
    t_true: usize,
    n: usize,
    seeds: usize,
    noise: f64,
    dim: usize,
    zipf: Option<f64>,
) -> Result<(), CliError> {
    let mut config = CalibrationConfig::new(t_true, n, seeds);
    config.master_seed = ctx.seed;
    config.dim = dim;
    config.noise_level = noise;
    if let Some(exponent) = zipf {
        config.popularity = Popularity::Zipf { exponent };
    }

    let summary = calibration_run(&config).map_err(|e| CliError::usage(e.to_string()))?;

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["seed_index", "total", "unique", "estimated_t"])
        .map_err(|e| CliError::analysis(format!("csv: {e}")))?;
    for record in &summary.records {
        writer
            .write_record([
                record.seed_index.to_string(),
                record.total.to_string(),
                record.unique.to_string(),
                record
                    .estimate
                    .as_ref()
                    .map(|e| format!("{:.2}", e.space_size))
                    .unwrap_or_default(),
            ])
            .map_err(|e| CliError::analysis(format!("csv: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::analysis(format!("csv: {e}")))?;
    let csv_text = String::from_utf8(bytes).map_err(|e| CliError::analysis(format!("csv: {e}")))?;

    let out_dir = ctx.out_dir();
    let csv_path = out_dir.join("calibration.csv");
    write_text(&csv_path, &csv_text)?;

    let mut manifest = ManifestBuilder::new(serde_json::json!({
        "command": "simulate",
        "t_true": t_true,
        "n": n,
        "seeds": seeds,
        "noise": noise,
        "dim": dim,
        "zipf": zipf,
        "master_seed": ctx.seed,
    }));
    manifest.output(&csv_path);
    manifest.write(&out_dir)?;

    match (summary.mean_estimate, summary.stddev_estimate) {
        (Some(mean), Some(sd)) => {
            let rel = (mean - t_true as f64) / t_true as f64 * 100.0;
            println!(
                "true T = {t_true}: mean estimate {mean:.0} (sd {sd:.0}, {rel:+.1}%), \
                 {} of {} seeds skipped (no duplicates)",
                summary.skipped, seeds
            );
        }
        _ => println!("all {seeds} seeds skipped: no duplicates observed at N = {n}"),
    }
    println!("wrote {}", csv_path.display());
    Ok(())
}
