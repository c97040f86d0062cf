//! Bootstrap and permutation significance tests for differences in pool
//! diversity. The resampling unit is the per-idea mean similarity, which
//! sidesteps the heavy dependence between raw pairwise values.
//!
//! Per-resample randomness comes from counter-based streams derived from
//! (seed, resample index), so parallel and serial runs are bit-identical.
//! Bootstrap streams are additionally keyed by group content and the
//! permutation partition always puts the smaller group first, which makes
//! swapping the two inputs negate the statistic while leaving the p-value
//! exactly unchanged.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::embedding::EmbeddedPool;
use crate::similarity::{cosine, SimilarityError};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Bootstrap,
    Permutation,
}

impl std::fmt::Display for TestMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestMethod::Bootstrap => write!(f, "bootstrap"),
            TestMethod::Permutation => write!(f, "permutation"),
        }
    }
}

/// Result of a two-sided resampling test on mean difference (A - B).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub method: TestMethod,
    /// Observed difference of group means, A - B.
    pub statistic: f64,
    /// Add-one corrected: (r + 1) / (n + 1) with r the count of resampled
    /// statistics at least as extreme as the observed one.
    pub p_value: f64,
    pub n_resamples: usize,
    pub seed: u64,
}

/// For each idea, the mean cosine to all other ideas in its pool. This is
/// the per-idea resampling unit for the tests below.
pub fn per_idea_mean_similarity(pool: &EmbeddedPool) -> Result<Vec<f64>, StatsError> {
    let n = pool.len();
    if n < 2 {
        return Err(StatsError::Input(format!("need at least 2 ideas, got {n}")));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            if i != j {
                sum += cosine(&pool.vectors[i], &pool.vectors[j])?;
            }
        }
        out.push(sum / (n - 1) as f64);
    }
    Ok(out)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn check_inputs(a: &[f64], b: &[f64], n_resamples: usize) -> Result<(), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Input("both samples must be non-empty".to_string()));
    }
    if n_resamples < 1 {
        return Err(StatsError::Input("need at least 1 resample".to_string()));
    }
    Ok(())
}

fn stream_rng(seed: u64, resample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(resample as u64 + 1);
    rng
}

/// Order-independent digest of a sample, used to key bootstrap streams by
/// group content rather than argument position.
fn content_key(values: &[f64]) -> u64 {
    let mut sorted: Vec<u64> = values.iter().map(|v| v.to_bits()).collect();
    sorted.sort_unstable();
    let mut hash = 0xcbf2_9ce4_8422_2325_u64;
    for bits in sorted {
        for byte in bits.to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

/// Two-sided permutation test of mean(a) - mean(b). Each resample shuffles
/// the pooled values into groups of the original sizes.
pub fn permutation_test(
    a: &[f64],
    b: &[f64],
    n_permutations: usize,
    seed: u64,
) -> Result<TestResult, StatsError> {
    check_inputs(a, b, n_permutations)?;
    let observed = mean(a) - mean(b);

    // Sort the pooled values so the shuffle input does not depend on which
    // sample came first; the smaller group is always drawn as the prefix.
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_unstable_by(f64::total_cmp);
    let small = a.len().min(b.len());
    let total = pooled.len();

    let mut extreme = 0_usize;
    let mut shuffled = pooled;
    for r in 0..n_permutations {
        let mut rng = stream_rng(seed, r);
        shuffled.shuffle(&mut rng);
        let prefix_mean = mean(&shuffled[..small]);
        let rest_mean = mean(&shuffled[small..]);
        let stat = prefix_mean - rest_mean;
        if stat.abs() >= observed.abs() {
            extreme += 1;
        }
        shuffled.sort_unstable_by(f64::total_cmp);
    }

    debug_assert_eq!(shuffled.len(), total);
    Ok(TestResult {
        method: TestMethod::Permutation,
        statistic: observed,
        p_value: (extreme + 1) as f64 / (n_permutations + 1) as f64,
        n_resamples: n_permutations,
        seed,
    })
}

/// Two-sided bootstrap test of mean(a) - mean(b). Each group is resampled
/// with replacement at its own size; the bootstrap difference distribution
/// is recentered at zero before tail counting.
pub fn bootstrap_test(
    a: &[f64],
    b: &[f64],
    n_resamples: usize,
    seed: u64,
) -> Result<TestResult, StatsError> {
    check_inputs(a, b, n_resamples)?;
    let observed = mean(a) - mean(b);
    let key_a = content_key(a);
    let key_b = content_key(b);

    let mut extreme = 0_usize;
    for r in 0..n_resamples {
        let mean_a = bootstrap_mean(a, seed ^ key_a, r);
        let mean_b = bootstrap_mean(b, seed ^ key_b, r);
        let centered = (mean_a - mean_b) - observed;
        if centered.abs() >= observed.abs() {
            extreme += 1;
        }
    }

    Ok(TestResult {
        method: TestMethod::Bootstrap,
        statistic: observed,
        p_value: (extreme + 1) as f64 / (n_resamples + 1) as f64,
        n_resamples,
        seed,
    })
}

fn bootstrap_mean(values: &[f64], stream_seed: u64, resample: usize) -> f64 {
    let mut rng = stream_rng(stream_seed, resample);
    let mut sum = 0.0;
    for _ in 0..values.len() {
        sum += values[rng.random_range(0..values.len())];
    }
    sum / values.len() as f64
}
