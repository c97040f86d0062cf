//! Command-line surface for the idea diversity toolkit: generate pools from
//! an endpoint (or the offline mock), embed them, and emit the analysis
//! artifacts as CSV files with SVG plots.

mod commands;
mod manifest;
mod report;
mod support;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use support::CliError;

#[derive(Parser)]
#[command(name = "ideabench", version, about = "Generate idea pools and measure their diversity")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Strategy catalog file; the bundled catalog when omitted.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,

    /// Embedding provider: "deterministic:<dim>:<seed>" or "remote:<model>"
    /// (remote reads the endpoint URL from IDEABENCH_EMBED_URL).
    #[arg(long, global = true, default_value = "deterministic:256:0")]
    embed_provider: String,

    /// Use the scripted offline endpoint instead of a live one.
    #[arg(long, global = true)]
    mock: bool,

    /// Master seed for mock generation and resampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output directory; commands that write files default to ./ideabench-out.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Embedding cache directory; IDEABENCH_CACHE_DIR when unset.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a strategy's generation campaign; write pools, transcripts, manifest.
    Generate {
        /// Strategy id from the catalog.
        #[arg(long)]
        strategy: String,
        /// Override the catalog's number of sessions.
        #[arg(long)]
        sessions: Option<usize>,
        /// Override the catalog's ideas per session.
        #[arg(long)]
        ideas: Option<usize>,
        /// Run the session(s) chunked up to this many total ideas.
        #[arg(long)]
        chunked_total: Option<usize>,
    },
    /// Embed pools, warming the vector cache.
    Embed {
        /// Pool files.
        #[arg(required = true)]
        pools: Vec<PathBuf>,
    },
    /// Leaderboard, density data, and a between-pool matrix, with SVG plots.
    Report {
        #[arg(required = true)]
        pools: Vec<PathBuf>,
        /// Restrict between-pool comparison to each pool's first K ideas.
        #[arg(long, default_value_t = 50)]
        first_k: usize,
    },
    /// Max-similarity-to-prior exhaustion curve for one pool.
    Exhaustion {
        pool: PathBuf,
        /// Exponential smoothing factor.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Only chart the first N ideas.
        #[arg(long)]
        first_n: Option<usize>,
    },
    /// Unique-idea counts and opportunity-space estimates per pool.
    Estimate {
        #[arg(required = true)]
        pools: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
        /// Also report the mean estimate across pools.
        #[arg(long)]
        per_run: bool,
    },
    /// Bootstrap / permutation significance test between two pool sets.
    Compare {
        /// Pool files for side A.
        #[arg(long = "a", num_args = 1.., required = true)]
        set_a: Vec<PathBuf>,
        /// Pool files for side B.
        #[arg(long = "b", num_args = 1.., required = true)]
        set_b: Vec<PathBuf>,
        /// "permutation", "bootstrap", or "both".
        #[arg(long, default_value = "both")]
        method: String,
        #[arg(long, default_value_t = 9999)]
        resamples: usize,
    },
    /// Most common ideas across pools, largest cluster first.
    Common {
        #[arg(required = true)]
        pools: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
    },
    /// Set or clear a pool's manual-exclusion flag.
    Exclude {
        pool: PathBuf,
        /// Clear the flag instead of setting it.
        #[arg(long)]
        clear: bool,
    },
    /// List the strategy catalog.
    Strategies,
    /// Rebuild pools from stored transcripts.
    Replay {
        #[arg(required = true)]
        transcripts: Vec<PathBuf>,
    },
    /// Calibrate the opportunity-space estimator on simulated idea spaces.
    Simulate {
        /// True number of distinct latent ideas.
        #[arg(long)]
        t_true: usize,
        /// Draws per seed.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 64)]
        dim: usize,
        /// Zipf popularity exponent (uniform sampling when unset).
        #[arg(long)]
        zipf: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Analysis(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = support::Context::from_flags(
        cli.catalog,
        cli.embed_provider,
        cli.mock,
        cli.seed,
        cli.out,
        cli.cache_dir,
    );
    match cli.command {
        Command::Generate { strategy, sessions, ideas, chunked_total } => {
            commands::generate::run(&ctx, &strategy, sessions, ideas, chunked_total)
        }
        Command::Embed { pools } => commands::embed::run(&ctx, &pools),
        Command::Report { pools, first_k } => commands::report_cmd::run(&ctx, &pools, first_k),
        Command::Exhaustion { pool, alpha, first_n } => {
            commands::exhaustion::run(&ctx, &pool, alpha, first_n)
        }
        Command::Estimate { pools, threshold, per_run } => {
            commands::estimate::run(&ctx, &pools, threshold, per_run)
        }
        Command::Compare { set_a, set_b, method, resamples } => {
            commands::compare::run(&ctx, &set_a, &set_b, &method, resamples)
        }
        Command::Common { pools, threshold, top_k } => {
            commands::common::run(&ctx, &pools, threshold, top_k)
        }
        Command::Exclude { pool, clear } => commands::exclude::run(&pool, clear),
        Command::Strategies => commands::strategies::run(&ctx),
        Command::Replay { transcripts } => commands::replay::run(&ctx, &transcripts),
        Command::Simulate { t_true, n, seeds, noise, dim, zipf } => {
            commands::simulate::run(&ctx, t_true, n, seeds, noise, dim, zipf)
        }
    }
}
