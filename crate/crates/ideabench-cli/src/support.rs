//! Shared command plumbing: flag resolution, provider parsing, pool loading
//! and embedding, and the two-level error taxonomy behind the exit codes
//! (1 analysis, 2 usage/config).

use std::path::{Path, PathBuf};

use ideabench::embedding::{EmbeddedPool, Embedder, ProviderConfig};
use ideabench::generation::StrategyCatalog;
use ideabench::model::{load_pool, Pool};

/// Environment variable holding the remote embedding endpoint URL.
pub const EMBED_URL_VAR: &str = "IDEABENCH_EMBED_URL";
/// Environment variable holding the default embedding cache directory.
pub const CACHE_DIR_VAR: &str = "IDEABENCH_CACHE_DIR";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config, missing environment: exit code 2.
    Usage(String),
    /// The data could not be analyzed as requested: exit code 1.
    Analysis(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn analysis(message: impl Into<String>) -> Self {
        CliError::Analysis(message.into())
    }
}

pub struct Context {
    pub catalog_path: Option<PathBuf>,
    pub embed_provider: String,
    pub mock: bool,
    pub seed: u64,
    out: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
}

impl Context {
    pub fn from_flags(
        catalog_path: Option<PathBuf>,
        embed_provider: String,
        mock: bool,
        seed: u64,
        out: Option<PathBuf>,
        cache_dir: Option<PathBuf>,
    ) -> Self {
        Self {
            catalog_path,
            embed_provider,
            mock,
            seed,
            out,
            cache_dir,
        }
    }

    pub fn catalog(&self) -> Result<StrategyCatalog, CliError> {
        match &self.catalog_path {
            Some(path) => StrategyCatalog::from_path(path)
                .map_err(|e| CliError::usage(format!("catalog {}: {e}", path.display()))),
            None => Ok(StrategyCatalog::bundled()),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("ideabench-out"))
    }

    fn resolved_cache_dir(&self) -> Option<PathBuf> {
        self.cache_dir
            .clone()
            .or_else(|| std::env::var(CACHE_DIR_VAR).ok().map(PathBuf::from))
    }

    /// Parses the --embed-provider flag into a provider configuration.
    pub fn provider_config(&self) -> Result<ProviderConfig, CliError> {
        let mut config = parse_provider(&self.embed_provider)?;
        config.cache_dir = self.resolved_cache_dir();
        Ok(config)
    }

    pub fn embedder(&self) -> Result<Embedder, CliError> {
        Ok(Embedder::new(self.provider_config()?))
    }

    /// Seconds since the epoch, pinned to zero under --mock so reruns with
    /// one seed write identical pool files.
    pub fn created_at(&self) -> u64 {
        if self.mock {
            0
        } else {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        }
    }
}

fn parse_provider(spec: &str) -> Result<ProviderConfig, CliError> {
    let mut parts = spec.split(':');
    match parts.next() {
        Some("deterministic") => {
            let dim: usize = parts
                .next()
                .unwrap_or("256")
                .parse()
                .map_err(|_| CliError::usage(format!("bad provider dim in {spec:?}")))?;
            let seed: u64 = parts
                .next()
                .unwrap_or("0")
                .parse()
                .map_err(|_| CliError::usage(format!("bad provider seed in {spec:?}")))?;
            if dim < 2 {
                return Err(CliError::usage("deterministic provider needs dim >= 2"));
            }
            Ok(ProviderConfig::deterministic(dim, seed))
        }
        Some("remote") => {
            let model = parts.next().filter(|m| !m.is_empty()).ok_or_else(|| {
                CliError::usage("remote provider needs a model name: remote:<model>")
            })?;
            let url = std::env::var(EMBED_URL_VAR).map_err(|_| {
                CliError::usage(format!("environment variable {EMBED_URL_VAR} is not set"))
            })?;
            Ok(ProviderConfig::remote(url, model))
        }
        _ => Err(CliError::usage(format!(
            "unknown embed provider {spec:?}; use deterministic:<dim>:<seed> or remote:<model>"
        ))),
    }
}

pub fn load_pools(paths: &[PathBuf]) -> Result<Vec<Pool>, CliError> {
    paths
        .iter()
        .map(|p| load_pool(p).map_err(|e| CliError::usage(format!("{}: {e}", p.display()))))
        .collect()
}

/// Embeds pools with one embedder; pools flagged excluded are skipped (with
/// a note) because aggregate statistics ignore them.
pub fn embed_pools(
    embedder: &Embedder,
    pools: Vec<Pool>,
    skip_excluded: bool,
) -> Result<Vec<EmbeddedPool>, CliError> {
    let mut embedded = Vec::with_capacity(pools.len());
    for pool in pools {
        if skip_excluded && pool.excluded {
            eprintln!("note: skipping excluded pool {} (session {})",
                pool.strategy_id,
                pool.provenance.get("session").map(String::as_str).unwrap_or("?"));
            continue;
        }
        embedded.push(
            embedder
                .embed_pool(&pool)
                .map_err(|e| CliError::analysis(format!("embedding {}: {e}", pool.strategy_id)))?,
        );
    }
    Ok(embedded)
}

pub fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::analysis(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, content).map_err(|e| CliError::analysis(format!("{}: {e}", path.display())))
}
