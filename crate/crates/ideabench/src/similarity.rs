//! Cosine similarity and the pairwise / within-pool / between-pool
//! statistics built on it, plus exponential smoothing of similarity series.
//!
//! All vectors arrive unit-normalized from the embedding layer, so cosine
//! reduces to a clamped dot product.

use thiserror::Error;

use crate::embedding::{EmbeddedPool, Vector};

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("input error: {0}")]
    Input(String),
    #[error("pool is not embedded")]
    State,
    #[error("provider mismatch: {0} vs {1}")]
    Config(String, String),
}

/// Cosine of the angle between two unit vectors, clamped to [-1, 1].
pub fn cosine(a: &Vector, b: &Vector) -> Result<f64, SimilarityError> {
    if a.dim() != b.dim() {
        return Err(SimilarityError::Dimension(a.dim(), b.dim()));
    }
    let dot: f64 = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| x * y)
        .sum();
    Ok(dot.clamp(-1.0, 1.0))
}

/// Symmetric n-by-n matrix of pairwise cosines, unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Strictly-upper-triangular entries in row-major order.
    pub fn upper_triangle(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| self.get(i, j)))
    }
}

/// Pairwise cosine matrix over a pool, in idea order.
pub fn pairwise_matrix(pool: &EmbeddedPool) -> Result<SimilarityMatrix, SimilarityError> {
    if pool.is_empty() {
        return Err(SimilarityError::State);
    }
    let n = pool.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            let c = cosine(&pool.vectors[i], &pool.vectors[j])?;
            values[i * n + j] = c;
            values[j * n + i] = c;
        }
    }
    Ok(SimilarityMatrix { n, values })
}

/// Mean cosine over the n(n-1)/2 distinct pairs; self-pairs excluded.
pub fn within_pool_mean(matrix: &SimilarityMatrix) -> Result<f64, SimilarityError> {
    let n = matrix.n();
    if n < 2 {
        return Err(SimilarityError::Input(format!(
            "within-pool mean needs at least 2 ideas, got {n}"
        )));
    }
    let sum: f64 = matrix.upper_triangle().sum();
    Ok(sum / (n * (n - 1) / 2) as f64)
}

/// Mean cosine over all cross pairs between two pools, optionally
/// restricted to each pool's first `first_k` ideas.
pub fn between_pool_mean(
    a: &EmbeddedPool,
    b: &EmbeddedPool,
    first_k: Option<usize>,
) -> Result<f64, SimilarityError> {
    if a.provider != b.provider {
        return Err(SimilarityError::Config(a.provider.clone(), b.provider.clone()));
    }
    let (na, nb) = match first_k {
        Some(k) => {
            if a.len() < k || b.len() < k {
                return Err(SimilarityError::Input(format!(
                    "first_k={k} but pools have {} and {} ideas",
                    a.len(),
                    b.len()
                )));
            }
            (k, k)
        }
        None => (a.len(), b.len()),
    };
    if na == 0 || nb == 0 {
        return Err(SimilarityError::Input("between-pool mean needs non-empty pools".to_string()));
    }
    let mut sum = 0.0;
    for va in &a.vectors[..na] {
        for vb in &b.vectors[..nb] {
            sum += cosine(va, vb)?;
        }
    }
    Ok(sum / (na * nb) as f64)
}

/// For each idea after the first, its max cosine against all earlier ideas.
/// Output length is n-1; order sensitivity is the point.
pub fn max_similarity_to_prior(pool: &EmbeddedPool) -> Result<Vec<f64>, SimilarityError> {
    if pool.len() < 2 {
        return Err(SimilarityError::Input(format!(
            "need at least 2 embedded ideas, got {}",
            pool.len()
        )));
    }
    let mut out = Vec::with_capacity(pool.len() - 1);
    for k in 1..pool.len() {
        let mut best = f64::NEG_INFINITY;
        for i in 0..k {
            best = best.max(cosine(&pool.vectors[k], &pool.vectors[i])?);
        }
        out.push(best);
    }
    Ok(out)
}

/// Exponential smoothing: s[0] = x[0], s[t] = alpha*x[t] + (1-alpha)*s[t-1].
pub fn exp_smooth(series: &[f64], alpha: f64) -> Result<Vec<f64>, SimilarityError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(SimilarityError::Input(format!("alpha must be in (0, 1], got {alpha}")));
    }
    if series.is_empty() {
        return Err(SimilarityError::Input("cannot smooth an empty series".to_string()));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut state = series[0];
    out.push(state);
    for &x in &series[1..] {
        state = alpha * x + (1.0 - alpha) * state;
        out.push(state);
    }
    Ok(out)
}

/// A raw max-similarity-to-prior series together with its smoothed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilaritySeries {
    pub raw: Vec<f64>,
    pub smoothed: Vec<f64>,
    pub alpha: f64,
}

#[cfg(test)]
// Frozen expected values like 0.70711 are asserted as written.
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use crate::model::{Idea, Pool};

    pub(crate) fn pool_from_vectors(vectors: Vec<Vec<f64>>) -> EmbeddedPool {
        let mut pool = Pool::new("fixture", 0);
        for (i, _) in vectors.iter().enumerate() {
            pool.ideas.push(Idea {
                id: Idea::position_id("fixture", 0, i),
                name: format!("v{i}"),
                description: String::new(),
                raw_text: format!("v{i}"),
                strategy_id: "fixture".to_string(),
                session_index: 0,
                idea_index: i,
            });
        }
        let vectors = vectors
            .into_iter()
            .map(|v| Vector::normalized(v).unwrap())
            .collect();
        EmbeddedPool::new(pool, vectors, "fixture").unwrap()
    }

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn cosine_identical_is_one() {
        let a = Vector::normalized(vec![1.0, 0.0]).unwrap();
        assert_eq!(cosine(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn cosine_orthogonal_is_zero() {
        let a = Vector::normalized(vec![1.0, 0.0]).unwrap();
        let b = Vector::normalized(vec![0.0, 1.0]).unwrap();
        assert_eq!(cosine(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn cosine_forty_five_degrees() {
        let a = Vector::normalized(vec![1.0, 0.0]).unwrap();
        let b = Vector::normalized(vec![INV_SQRT2, INV_SQRT2]).unwrap();
        assert!((cosine(&a, &b).unwrap() - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn cosine_dimension_mismatch() {
        let a = Vector::normalized(vec![1.0, 0.0]).unwrap();
        let b = Vector::normalized(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(cosine(&a, &b), Err(SimilarityError::Dimension(2, 3))));
    }

    #[test]
    fn single_idea_matrix_is_unit() {
        let pool = pool_from_vectors(vec![vec![1.0, 0.0]]);
        let m = pairwise_matrix(&pool).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.get(0, 0), 1.0);
    }

    #[test]
    fn orthogonal_triple_gives_identity_matrix() {
        let pool = pool_from_vectors(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let m = pairwise_matrix(&pool).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn mixed_triple_matrix_and_mean() {
        let pool = pool_from_vectors(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![INV_SQRT2, INV_SQRT2],
        ]);
        let m = pairwise_matrix(&pool).unwrap();
        let mut off: Vec<f64> = m.upper_triangle().collect();
        off.sort_by(f64::total_cmp);
        assert!((off[0] - 0.0).abs() < 1e-9);
        assert!((off[1] - 0.70711).abs() < 1e-5);
        assert!((off[2] - 0.70711).abs() < 1e-5);
        assert!((within_pool_mean(&m).unwrap() - 0.47140).abs() < 1e-5);
    }

    #[test]
    fn within_pool_mean_identical_pair_is_one() {
        let pool = pool_from_vectors(vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        let m = pairwise_matrix(&pool).unwrap();
        assert_eq!(within_pool_mean(&m).unwrap(), 1.0);
    }

    #[test]
    fn within_pool_mean_needs_two() {
        let pool = pool_from_vectors(vec![vec![1.0, 0.0]]);
        let m = pairwise_matrix(&pool).unwrap();
        assert!(matches!(within_pool_mean(&m), Err(SimilarityError::Input(_))));
    }

    #[test]
    fn between_pool_mean_same_pool_includes_self_pairs() {
        let pool = pool_from_vectors(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![INV_SQRT2, INV_SQRT2],
        ]);
        let m = pairwise_matrix(&pool).unwrap();
        let upper: f64 = m.upper_triangle().sum();
        let n = pool.len() as f64;
        let expected = (n + 2.0 * upper) / (n * n);
        let got = between_pool_mean(&pool, &pool, None).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn between_pool_mean_orthogonal_singletons() {
        let a = pool_from_vectors(vec![vec![1.0, 0.0]]);
        let b = pool_from_vectors(vec![vec![0.0, 1.0]]);
        assert_eq!(between_pool_mean(&a, &b, None).unwrap(), 0.0);
    }

    #[test]
    fn between_pool_mean_asymmetric_sizes() {
        let a = pool_from_vectors(vec![vec![1.0, 0.0]]);
        let b = pool_from_vectors(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((between_pool_mean(&a, &b, None).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn between_pool_mean_rejects_provider_mismatch() {
        let a = pool_from_vectors(vec![vec![1.0, 0.0]]);
        let mut b = pool_from_vectors(vec![vec![1.0, 0.0]]);
        b.provider = "other".to_string();
        assert!(matches!(
            between_pool_mean(&a, &b, None),
            Err(SimilarityError::Config(_, _))
        ));
    }

    #[test]
    fn between_pool_mean_first_k_requires_enough_ideas() {
        let a = pool_from_vectors(vec![vec![1.0, 0.0]]);
        let b = pool_from_vectors(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(between_pool_mean(&a, &b, Some(2)).is_err());
        assert!(between_pool_mean(&a, &b, Some(1)).is_ok());
    }

    #[test]
    fn max_similarity_to_prior_basic() {
        let pool = pool_from_vectors(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(max_similarity_to_prior(&pool).unwrap(), vec![0.0]);
    }

    #[test]
    fn max_similarity_to_prior_duplicate_returns_one() {
        let pool = pool_from_vectors(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(max_similarity_to_prior(&pool).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn max_similarity_to_prior_mixed() {
        let pool = pool_from_vectors(vec![
            vec![1.0, 0.0],
            vec![INV_SQRT2, INV_SQRT2],
            vec![0.0, 1.0],
        ]);
        let series = max_similarity_to_prior(&pool).unwrap();
        assert!((series[0] - 0.70711).abs() < 1e-5);
        assert!((series[1] - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn max_similarity_is_order_sensitive() {
        let ordered = pool_from_vectors(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        let shuffled = pool_from_vectors(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_ne!(
            max_similarity_to_prior(&ordered).unwrap(),
            max_similarity_to_prior(&shuffled).unwrap()
        );
    }

    #[test]
    fn exp_smooth_constant_series_is_fixed_point() {
        for alpha in [0.1, 0.5, 1.0] {
            let smoothed = exp_smooth(&[0.3, 0.3, 0.3], alpha).unwrap();
            for v in smoothed {
                assert!((v - 0.3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exp_smooth_alpha_one_is_identity() {
        let xs = [0.2, 0.9, 0.1, 0.5];
        assert_eq!(exp_smooth(&xs, 1.0).unwrap(), xs.to_vec());
    }

    #[test]
    fn exp_smooth_single_step() {
        assert_eq!(exp_smooth(&[0.0, 1.0], 0.5).unwrap(), vec![0.0, 0.5]);
    }

    #[test]
    fn exp_smooth_rejects_bad_alpha() {
        assert!(exp_smooth(&[1.0], 0.0).is_err());
        assert!(exp_smooth(&[1.0], 1.5).is_err());
    }

    #[test]
    fn exp_smooth_stays_within_series_bounds() {
        let xs = [0.9, 0.1, 0.4, 0.8, 0.2];
        let s = exp_smooth(&xs, 0.3).unwrap();
        let (lo, hi) = (0.1, 0.9);
        assert!(s.iter().all(|&v| v >= lo && v <= hi));
    }
}
