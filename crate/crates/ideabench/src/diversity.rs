//! Diversity analysis over embedded pools: unique-idea counting at a cosine
//! threshold, opportunity-space estimation from the repeat-observation rate,
//! exhaustion curves, a greedy lowest-cosine-add selector, and
//! most-common-idea clustering.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::embedding::EmbeddedPool;
use crate::model::Pool;
use crate::similarity::{cosine, exp_smooth, max_similarity_to_prior, SimilarityError, SimilaritySeries};

#[derive(Debug, Error)]
pub enum DiversityError {
    #[error("input error: {0}")]
    Input(String),
    #[error("no duplicates observed (U = {unique} of N = {total}); the space estimate diverges")]
    InsufficientDuplicates { total: usize, unique: usize },
    #[error("root finder did not converge: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

/// Dedup rule: two ideas are the same when their cosine is >= threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DedupConfig {
    pub threshold: f64,
}

impl Default for DedupConfig {
    fn default() -> Self {
        Self { threshold: 0.8 }
    }
}

impl DedupConfig {
    fn validate(&self) -> Result<(), DiversityError> {
        if self.threshold > 0.0 && self.threshold <= 1.0 {
            Ok(())
        } else {
            Err(DiversityError::Input(format!(
                "threshold must be in (0, 1], got {}",
                self.threshold
            )))
        }
    }
}

/// A duplicate idea and the earlier idea it matched.
#[derive(Debug, Clone, PartialEq)]
pub struct DuplicateLink {
    pub later: usize,
    pub earlier: usize,
    pub similarity: f64,
}

/// Outcome of scanning a pool for duplicates in generation order.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub total: usize,
    pub unique: usize,
    pub threshold: f64,
    pub duplicate_links: Vec<DuplicateLink>,
}

/// Scans ideas in generation order: idea k is a duplicate iff its max cosine
/// to any earlier idea reaches the threshold. The first idea is always
/// unique. Each duplicate links to the earliest earlier index achieving the
/// max similarity.
pub fn count_unique(pool: &EmbeddedPool, config: DedupConfig) -> Result<UniquenessReport, DiversityError> {
    config.validate()?;
    if pool.is_empty() {
        return Err(DiversityError::Input("cannot scan an empty pool".to_string()));
    }
    let n = pool.len();
    let mut duplicate_links = Vec::new();
    for k in 1..n {
        let mut best = f64::NEG_INFINITY;
        let mut best_at = 0;
        for i in 0..k {
            let c = cosine(&pool.vectors[k], &pool.vectors[i])?;
            if c > best {
                best = c;
                best_at = i;
            }
        }
        if best >= config.threshold {
            duplicate_links.push(DuplicateLink {
                later: k,
                earlier: best_at,
                similarity: best,
            });
        }
    }
    Ok(UniquenessReport {
        total: n,
        unique: n - duplicate_links.len(),
        threshold: config.threshold,
        duplicate_links,
    })
}

/// Fraction of ideas that repeated an earlier one: (N - U) / N.
pub fn repetition_rate(report: &UniquenessReport) -> f64 {
    (report.total - report.unique) as f64 / report.total as f64
}

/// Capture-recapture estimate of how many distinct ideas a strategy can
/// ever produce, from total ideas N and observed unique ideas U.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationEstimate {
    pub total: usize,
    pub unique: usize,
    /// Per-idea capture rate parameter; the solved root.
    pub rate: f64,
    /// Estimated opportunity-space size, the reciprocal of the rate.
    pub space_size: f64,
}

const ESTIMATE_RELATIVE_TOLERANCE: f64 = 1e-9;

/// Expected unique count after n draws at capture rate a, computed as
/// -expm1(-a*n)/a for accuracy at small a. Strictly decreasing in a, with
/// limit n as a -> 0 and limit 0 as a -> infinity.
fn expected_unique(rate: f64, total: usize) -> f64 {
    -f64::exp_m1(-rate * total as f64) / rate
}

/// Solves U = (1/a)(1 - e^(-aN)) for the unique root a > 0 by bracketing
/// bisection, then reports the space size T = 1/a. Requires at least one
/// observed duplicate; with U = N the root runs off to zero and the
/// estimate diverges.
pub fn estimate_population(total: usize, unique: usize) -> Result<PopulationEstimate, DiversityError> {
    if unique == 0 {
        return Err(DiversityError::Input("unique count must be at least 1".to_string()));
    }
    if unique >= total {
        return Err(DiversityError::InsufficientDuplicates { total, unique });
    }

    let target = unique as f64;
    let mut lo = 1e-12;
    let mut hi = 1.0;
    // The bracket [1e-12, 1] already straddles the root for any valid
    // (N, U); keep expanding defensively in case of extreme inputs.
    let mut expansions = 0;
    while expected_unique(hi, total) > target {
        hi *= 2.0;
        expansions += 1;
        if expansions > 64 {
            return Err(DiversityError::NoConvergence(format!(
                "no upper bracket for N={total}, U={unique}"
            )));
        }
    }

    let mut root = f64::NAN;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let value = expected_unique(mid, total);
        if ((target - value) / target).abs() <= ESTIMATE_RELATIVE_TOLERANCE {
            root = mid;
            break;
        }
        if value > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if root.is_nan() {
        return Err(DiversityError::NoConvergence(format!(
            "residual above tolerance for N={total}, U={unique}"
        )));
    }
    Ok(PopulationEstimate {
        total,
        unique,
        rate: root,
        space_size: 1.0 / root,
    })
}

/// Exhaustion curve: per-idea max similarity to all prior ideas, smoothed.
pub fn exhaustion_curve(pool: &EmbeddedPool, alpha: f64) -> Result<SimilaritySeries, DiversityError> {
    let raw = max_similarity_to_prior(pool)?;
    let smoothed = exp_smooth(&raw, alpha)?;
    Ok(SimilaritySeries { raw, smoothed, alpha })
}

/// Greedy diverse-subset selector: starts from a seed-determined random
/// idea, then repeatedly adds the candidate with the lowest mean cosine to
/// the already-selected set (equivalently, the lowest impact on the selected
/// set's mean pairwise cosine). Ties break to the lowest candidate index.
pub fn greedy_min_similarity_subset(
    candidates: &EmbeddedPool,
    k: usize,
    seed: u64,
) -> Result<Pool, DiversityError> {
    let n = candidates.len();
    if k < 1 {
        return Err(DiversityError::Input("k must be at least 1".to_string()));
    }
    if k > n {
        return Err(DiversityError::Input(format!("k = {k} exceeds candidate count {n}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..n);

    let mut selected = Vec::with_capacity(k);
    let mut in_set = vec![false; n];
    // Running sum of cosine from each candidate to the selected set.
    let mut sum_to_selected = vec![0.0_f64; n];

    selected.push(first);
    in_set[first] = true;
    for c in 0..n {
        if !in_set[c] {
            sum_to_selected[c] = cosine(&candidates.vectors[c], &candidates.vectors[first])?;
        }
    }

    while selected.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for c in 0..n {
            if in_set[c] {
                continue;
            }
            let score = sum_to_selected[c];
            if best.map(|(s, _)| score < s).unwrap_or(true) {
                best = Some((score, c));
            }
        }
        let (_, chosen) = best.expect("k <= n leaves a candidate");
        selected.push(chosen);
        in_set[chosen] = true;
        for c in 0..n {
            if !in_set[c] {
                sum_to_selected[c] += cosine(&candidates.vectors[c], &candidates.vectors[chosen])?;
            }
        }
    }

    let mut pool = Pool::new(
        format!("{}-lowest_cosine_add", candidates.pool.strategy_id),
        candidates.pool.created_at,
    );
    pool.provenance = candidates.pool.provenance.clone();
    pool.provenance.insert("selection".to_string(), "lowest_cosine_add".to_string());
    pool.provenance.insert("selection_seed".to_string(), seed.to_string());
    pool.ideas = selected
        .iter()
        .map(|&i| candidates.pool.ideas[i].clone())
        .collect();
    Ok(pool)
}

/// Clusters the pooled ideas by single-linkage over the "same idea" relation
/// (cosine >= threshold) and returns clusters largest first. The
/// representative is the lowest-index member across the concatenated pools.
pub fn most_common_ideas(
    pools: &[EmbeddedPool],
    config: DedupConfig,
) -> Result<Vec<(crate::model::Idea, usize)>, DiversityError> {
    config.validate()?;
    if pools.is_empty() || pools.iter().all(|p| p.is_empty()) {
        return Err(DiversityError::Input("no ideas to cluster".to_string()));
    }
    let provider = &pools[0].provider;
    if let Some(other) = pools.iter().find(|p| &p.provider != provider) {
        return Err(DiversityError::Input(format!(
            "provider mismatch: {} vs {}",
            provider, other.provider
        )));
    }

    let all_vectors: Vec<_> = pools.iter().flat_map(|p| p.vectors.iter()).collect();
    let all_ideas: Vec<_> = pools.iter().flat_map(|p| p.pool.ideas.iter()).collect();
    let n = all_vectors.len();

    let mut dsu = DisjointSets::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if cosine(all_vectors[i], all_vectors[j])? >= config.threshold {
                dsu.union(i, j);
            }
        }
    }

    let mut size_by_root: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut representative: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for i in 0..n {
        let root = dsu.find(i);
        *size_by_root.entry(root).or_insert(0) += 1;
        representative.entry(root).or_insert(i);
    }

    let mut clusters: Vec<(usize, usize)> = size_by_root
        .into_iter()
        .map(|(root, size)| (representative[&root], size))
        .collect();
    clusters.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(clusters
        .into_iter()
        .map(|(rep, size)| (all_ideas[rep].clone(), size))
        .collect())
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}
