//! Pluggable text embedding: a remote HTTP endpoint for real runs, a
//! deterministic local embedder for tests and oracles, and a shared
//! content-addressed cache. Every provider normalizes on output, so all
//! downstream cosine math is a plain dot product.

mod cache;
mod deterministic;
mod remote;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::model::Pool;

pub use deterministic::deterministic_embed;
pub use remote::{RetryPolicy, EMBED_API_KEY_VAR};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("input error: {0}")]
    Input(String),
    #[error("provider error: {0}")]
    Provider(String),
    #[error("cache error: {0}")]
    Cache(#[from] std::io::Error),
}

impl EmbedError {
    fn provider(message: impl Into<String>) -> Self {
        EmbedError::Provider(message.into())
    }
}

/// A unit-normalized embedding. The Euclidean norm is 1 within 1e-6 for
/// every vector a provider emits.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    components: Vec<f64>,
}

impl Vector {
    /// Wraps components that are already unit-normalized.
    pub(crate) fn from_normalized(components: Vec<f64>) -> Self {
        debug_assert!(
            (components.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() < 1e-6,
            "vector is not unit length"
        );
        Self { components }
    }

    /// Normalizes arbitrary components to unit length.
    pub fn normalized(components: Vec<f64>) -> Result<Self, EmbedError> {
        let norm = components.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(EmbedError::Input(format!("cannot normalize vector with norm {norm}")));
        }
        Ok(Self {
            components: components.into_iter().map(|x| x / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Which embedding backend to use and how it is parameterized.
#[derive(Debug, Clone, PartialEq)]
pub enum ProviderKind {
    Remote {
        endpoint_url: String,
        model_name: String,
    },
    Deterministic {
        dim: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub cache_dir: Option<PathBuf>,
}

impl ProviderConfig {
    pub fn deterministic(dim: usize, seed: u64) -> Self {
        Self {
            kind: ProviderKind::Deterministic { dim, seed },
            cache_dir: None,
        }
    }

    pub fn remote(endpoint_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        Self {
            kind: ProviderKind::Remote {
                endpoint_url: endpoint_url.into(),
                model_name: model_name.into(),
            },
            cache_dir: None,
        }
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    /// Stable label identifying the provider configuration. Pools embedded
    /// with different labels cannot be compared to each other.
    pub fn fingerprint(&self) -> String {
        match &self.kind {
            ProviderKind::Remote { endpoint_url, model_name } => {
                format!("remote({model_name}@{endpoint_url})")
            }
            ProviderKind::Deterministic { dim, seed } => {
                format!("deterministic(dim={dim},seed={seed})")
            }
        }
    }

    /// Cache subdirectory label, the "model name" axis of the cache layout.
    fn cache_label(&self) -> String {
        match &self.kind {
            ProviderKind::Remote { model_name, .. } => model_name.clone(),
            ProviderKind::Deterministic { dim, seed } => format!("deterministic-{dim}-{seed}"),
        }
    }
}

/// A pool with one vector per idea, aligned by index.
#[derive(Debug, Clone)]
pub struct EmbeddedPool {
    pub pool: Pool,
    pub vectors: Vec<Vector>,
    /// Provider fingerprint the vectors were produced under.
    pub provider: String,
}

impl EmbeddedPool {
    pub fn new(pool: Pool, vectors: Vec<Vector>, provider: impl Into<String>) -> Result<Self, EmbedError> {
        if pool.ideas.len() != vectors.len() {
            return Err(EmbedError::Input(format!(
                "{} ideas but {} vectors",
                pool.ideas.len(),
                vectors.len()
            )));
        }
        if let Some(first) = vectors.first() {
            if let Some(odd) = vectors.iter().find(|v| v.dim() != first.dim()) {
                return Err(EmbedError::Input(format!(
                    "mixed vector dimensions {} and {}",
                    first.dim(),
                    odd.dim()
                )));
            }
        }
        Ok(Self {
            pool,
            vectors,
            provider: provider.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Counters for observing cache effectiveness.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct EmbedStats {
    pub cache_hits: usize,
    pub provider_calls: usize,
}

pub struct Embedder {
    config: ProviderConfig,
    remote: Option<remote::RemoteClient>,
    parallelism: usize,
    stats: Mutex<EmbedStats>,
}

impl Embedder {
    pub fn new(config: ProviderConfig) -> Self {
        Self::with_retry(config, RetryPolicy::default())
    }

    pub fn with_retry(config: ProviderConfig, retry: RetryPolicy) -> Self {
        let remote = match &config.kind {
            ProviderKind::Remote { endpoint_url, model_name } => {
                Some(remote::RemoteClient::new(endpoint_url, model_name, retry))
            }
            ProviderKind::Deterministic { .. } => None,
        };
        Self {
            config,
            remote,
            parallelism: 4,
            stats: Mutex::new(EmbedStats::default()),
        }
    }

    /// Maximum provider calls in flight during [`Embedder::embed_pool`].
    pub fn with_parallelism(mut self, parallelism: usize) -> Self {
        self.parallelism = parallelism.max(1);
        self
    }

    pub fn fingerprint(&self) -> String {
        self.config.fingerprint()
    }

    /// Cache hit / provider call counters accumulated since construction.
    pub fn stats(&self) -> EmbedStats {
        *self.stats.lock().unwrap()
    }

    /// Embeds one text: cache first, then the provider, then writes back.
    pub fn embed_text(&self, text: &str) -> Result<Vector, EmbedError> {
        if text.is_empty() {
            return Err(EmbedError::Input("empty text cannot be embedded".to_string()));
        }
        if let Some(v) = self.cache_read(text) {
            self.stats.lock().unwrap().cache_hits += 1;
            return Ok(v);
        }
        let vector = self.call_provider(text)?;
        self.cache_write(text, &vector)?;
        Ok(vector)
    }

    /// Embeds every idea in the pool, consulting the cache before any remote
    /// call and issuing at most one provider call per distinct text. Vectors
    /// are assembled in idea order regardless of completion order.
    pub fn embed_pool(&self, pool: &Pool) -> Result<EmbeddedPool, EmbedError> {
        for (i, idea) in pool.ideas.iter().enumerate() {
            if idea.raw_text.is_empty() {
                return Err(EmbedError::Input(format!("idea {i} has empty text")));
            }
        }

        // Map distinct texts to the pool indices that share them.
        let mut distinct: Vec<&str> = Vec::new();
        let mut text_slot: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
        let mut idea_slots = Vec::with_capacity(pool.ideas.len());
        for idea in &pool.ideas {
            let slot = *text_slot.entry(idea.raw_text.as_str()).or_insert_with(|| {
                distinct.push(idea.raw_text.as_str());
                distinct.len() - 1
            });
            idea_slots.push(slot);
        }

        let mut resolved: Vec<Option<Vector>> = vec![None; distinct.len()];
        let mut misses = Vec::new();
        for (slot, text) in distinct.iter().enumerate() {
            match self.cache_read(text) {
                Some(v) => {
                    self.stats.lock().unwrap().cache_hits += 1;
                    resolved[slot] = Some(v);
                }
                None => misses.push(slot),
            }
        }

        self.embed_misses(&distinct, &misses, &mut resolved, &idea_slots)?;

        for (slot, text) in distinct.iter().enumerate() {
            if misses.contains(&slot) {
                let v = resolved[slot].as_ref().expect("miss resolved");
                self.cache_write(text, v)?;
            }
        }

        let vectors = idea_slots
            .iter()
            .map(|&slot| resolved[slot].clone().expect("all slots resolved"))
            .collect();
        EmbeddedPool::new(pool.clone(), vectors, self.fingerprint())
    }

    fn embed_misses(
        &self,
        distinct: &[&str],
        misses: &[usize],
        resolved: &mut [Option<Vector>],
        idea_slots: &[usize],
    ) -> Result<(), EmbedError> {
        if misses.is_empty() {
            return Ok(());
        }
        let workers = self.parallelism.min(misses.len());
        let next = AtomicUsize::new(0);
        let outputs: Vec<Mutex<Option<Result<Vector, EmbedError>>>> =
            misses.iter().map(|_| Mutex::new(None)).collect();

        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let k = next.fetch_add(1, Ordering::SeqCst);
                    if k >= misses.len() {
                        break;
                    }
                    let result = self.call_provider(distinct[misses[k]]);
                    *outputs[k].lock().unwrap() = Some(result);
                });
            }
        });

        for (k, output) in outputs.into_iter().enumerate() {
            let slot = misses[k];
            match output.into_inner().unwrap() {
                Some(Ok(v)) => resolved[slot] = Some(v),
                Some(Err(e)) => {
                    let idea_index = idea_slots.iter().position(|&s| s == slot).unwrap_or(0);
                    return Err(EmbedError::Provider(format!("idea {idea_index}: {e}")));
                }
                None => unreachable!("worker never visited slot"),
            }
        }
        Ok(())
    }

    fn call_provider(&self, text: &str) -> Result<Vector, EmbedError> {
        self.stats.lock().unwrap().provider_calls += 1;
        match &self.config.kind {
            ProviderKind::Deterministic { dim, seed } => Ok(deterministic_embed(text, *dim, *seed)),
            ProviderKind::Remote { .. } => {
                self.remote.as_ref().expect("remote client configured").embed(text)
            }
        }
    }

    fn cache_read(&self, text: &str) -> Option<Vector> {
        let dir = self.config.cache_dir.as_ref()?;
        cache::read(&cache::cache_path(dir, &self.config.cache_label(), text))
    }

    fn cache_write(&self, text: &str, vector: &Vector) -> Result<(), EmbedError> {
        if let Some(dir) = &self.config.cache_dir {
            cache::write(&cache::cache_path(dir, &self.config.cache_label(), text), vector)?;
        }
        Ok(())
    }
}
