//! Synthetic ground-truth oracle: sample idea pools from a finite latent
//! space of known size to calibrate the opportunity-space estimator and
//! reproduce exhaustion dynamics qualitatively.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::diversity::{count_unique, estimate_population, DedupConfig, DiversityError, PopulationEstimate};
use crate::embedding::{EmbeddedPool, Vector};
use crate::model::{Idea, Pool};
use crate::similarity::cosine;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Diversity(#[from] DiversityError),
}

/// Margin below the dedup threshold enforced between latent vectors, so
/// latent identity is never ambiguous.
pub const SEPARATION_MARGIN: f64 = 0.05;

const ATTEMPTS_PER_VECTOR: usize = 200;

/// A finite latent idea space: `size` unit vectors, every pair strictly
/// below the dedup threshold minus the separation margin.
#[derive(Debug, Clone)]
pub struct SyntheticSpace {
    pub size: usize,
    pub dim: usize,
    pub seed: u64,
    pub threshold: f64,
    latent: Vec<Vector>,
}

impl SyntheticSpace {
    pub fn latent(&self, index: usize) -> &Vector {
        &self.latent[index]
    }

    /// Largest pairwise cosine among the latent vectors.
    pub fn max_pairwise_cosine(&self) -> f64 {
        let mut max = f64::NEG_INFINITY;
        for i in 0..self.latent.len() {
            for j in i + 1..self.latent.len() {
                max = max.max(cosine(&self.latent[i], &self.latent[j]).unwrap());
            }
        }
        max
    }
}

fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let components: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(v) = Vector::normalized(components) {
            return v;
        }
    }
}

/// Builds a latent space by rejection sampling: candidate vectors too close
/// to an accepted one are discarded. Fails once the attempt budget runs out,
/// which signals that `dim` is too small for `size` vectors.
pub fn build_space(size: usize, dim: usize, seed: u64, threshold: f64) -> Result<SyntheticSpace, SimError> {
    if size == 0 || dim < 2 {
        return Err(SimError::Input(format!("need size >= 1 and dim >= 2, got {size}/{dim}")));
    }
    let cutoff = threshold - SEPARATION_MARGIN;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut latent: Vec<Vector> = Vec::with_capacity(size);
    let budget = size * ATTEMPTS_PER_VECTOR;
    let mut attempts = 0;
    while latent.len() < size {
        attempts += 1;
        if attempts > budget {
            return Err(SimError::Construction(format!(
                "could not place {size} vectors below cosine {cutoff} in {dim} dimensions \
                 within {budget} attempts; increase dim"
            )));
        }
        let candidate = random_unit_vector(&mut rng, dim);
        let too_close = latent
            .iter()
            .any(|v| cosine(v, &candidate).unwrap() >= cutoff);
        if !too_close {
            latent.push(candidate);
        }
    }
    Ok(SyntheticSpace {
        size,
        dim,
        seed,
        threshold,
        latent,
    })
}

/// How draws pick latent ideas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Popularity {
    Uniform,
    /// Zipf-weighted popularity: latent idea i drawn with weight
    /// 1/(i+1)^exponent. Models hot-spot ideas; excluded from calibration.
    Zipf { exponent: f64 },
}

/// A sampled pool plus the log of which latent idea produced each draw.
#[derive(Debug, Clone)]
pub struct SampledPool {
    pub pool: EmbeddedPool,
    pub draws: Vec<usize>,
}

/// Draws `n` ideas with replacement from the latent space, perturbing each
/// draw by `noise_level` and renormalizing. Generation order is the draw
/// order.
pub fn sample_pool(space: &SyntheticSpace, n: usize, seed: u64, noise_level: f64) -> SampledPool {
    sample_pool_with(space, n, seed, noise_level, Popularity::Uniform)
}

pub fn sample_pool_with(
    space: &SyntheticSpace,
    n: usize,
    seed: u64,
    noise_level: f64,
    popularity: Popularity,
) -> SampledPool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Option<Vec<f64>> = match popularity {
        Popularity::Uniform => None,
        Popularity::Zipf { exponent } => {
            let raw: Vec<f64> = (0..space.size).map(|i| 1.0 / ((i + 1) as f64).powf(exponent)).collect();
            let total: f64 = raw.iter().sum();
            Some(raw.iter().map(|w| w / total).collect())
        }
    };

    let mut pool = Pool::new("simulated", 0);
    pool.provenance.insert("space_size".to_string(), space.size.to_string());
    pool.provenance.insert("noise_level".to_string(), noise_level.to_string());
    let mut vectors = Vec::with_capacity(n);
    let mut draws = Vec::with_capacity(n);
    for k in 0..n {
        let index = match &weights {
            None => rng.random_range(0..space.size),
            Some(w) => {
                let mut u: f64 = rng.random_range(0.0..1.0);
                let mut chosen = space.size - 1;
                for (i, wi) in w.iter().enumerate() {
                    if u < *wi {
                        chosen = i;
                        break;
                    }
                    u -= wi;
                }
                chosen
            }
        };
        draws.push(index);
        let vector = if noise_level > 0.0 {
            let perturbed: Vec<f64> = space
                .latent(index)
                .components()
                .iter()
                .map(|&c| {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    c + noise_level * noise
                })
                .collect();
            Vector::normalized(perturbed).expect("noise keeps vectors finite")
        } else {
            space.latent(index).clone()
        };
        vectors.push(vector);
        pool.ideas.push(Idea {
            id: Idea::position_id("simulated", 0, k),
            name: format!("latent {index}"),
            description: format!("draw {k} of latent idea {index}"),
            raw_text: format!("latent {index}: draw {k} of latent idea {index}"),
            strategy_id: "simulated".to_string(),
            session_index: 0,
            idea_index: k,
        });
    }
    let provider = format!("simulated(space={},dim={},seed={})", space.size, space.dim, space.seed);
    let pool = EmbeddedPool::new(pool, vectors, provider).expect("lengths match");
    SampledPool { pool, draws }
}

/// One calibration draw: the observed counts and the estimate, or None when
/// the sample had no duplicates to learn from.
#[derive(Debug, Clone)]
pub struct CalibrationRecord {
    pub seed_index: u64,
    pub total: usize,
    pub unique: usize,
    pub estimate: Option<PopulationEstimate>,
}

#[derive(Debug, Clone)]
pub struct CalibrationSummary {
    pub true_size: usize,
    pub records: Vec<CalibrationRecord>,
    pub mean_estimate: Option<f64>,
    pub stddev_estimate: Option<f64>,
    pub skipped: usize,
}

/// Inputs for a calibration sweep over many seeds.
#[derive(Debug, Clone)]
pub struct CalibrationConfig {
    pub true_size: usize,
    pub n: usize,
    pub n_seeds: usize,
    pub master_seed: u64,
    pub dim: usize,
    pub noise_level: f64,
    pub threshold: f64,
    pub popularity: Popularity,
}

impl CalibrationConfig {
    pub fn new(true_size: usize, n: usize, n_seeds: usize) -> Self {
        Self {
            true_size,
            n,
            n_seeds,
            master_seed: 0,
            dim: 64,
            noise_level: 0.0,
            threshold: 0.8,
            popularity: Popularity::Uniform,
        }
    }
}

/// For each seed: build a space, sample a pool, count unique ideas, and
/// estimate the space size. Seeds derive their randomness from
/// (master seed, seed index) and run independently in parallel.
pub fn calibration_run(config: &CalibrationConfig) -> Result<CalibrationSummary, SimError> {
    let n_seeds = config.n_seeds;
    if config.n < 2 || n_seeds < 1 {
        return Err(SimError::Input(format!(
            "need n >= 2 and n_seeds >= 1, got {}/{n_seeds}",
            config.n
        )));
    }

    let workers = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<CalibrationRecord, SimError>>>> =
        (0..n_seeds).map(|_| std::sync::Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers.min(n_seeds) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= n_seeds {
                    break;
                }
                *slots[i].lock().unwrap() = Some(calibration_record(config, i as u64));
            });
        }
    });

    let mut records = Vec::with_capacity(n_seeds);
    for slot in slots {
        records.push(slot.into_inner().unwrap().expect("worker filled slot")?);
    }

    let estimates: Vec<f64> = records
        .iter()
        .filter_map(|r| r.estimate.as_ref().map(|e| e.space_size))
        .collect();
    let skipped = records.len() - estimates.len();
    let (mean, sd) = if estimates.is_empty() {
        (None, None)
    } else {
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / estimates.len() as f64;
        (Some(mean), Some(var.sqrt()))
    };
    Ok(CalibrationSummary {
        true_size: config.true_size,
        records,
        mean_estimate: mean,
        stddev_estimate: sd,
        skipped,
    })
}

fn calibration_record(config: &CalibrationConfig, seed_index: u64) -> Result<CalibrationRecord, SimError> {
    let build_seed = config
        .master_seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(seed_index);
    let space = build_space(config.true_size, config.dim, build_seed, config.threshold)?;
    let sampled = sample_pool_with(
        &space,
        config.n,
        build_seed ^ 0x5bd1_e995,
        config.noise_level,
        config.popularity,
    );
    let report = count_unique(&sampled.pool, DedupConfig { threshold: config.threshold })?;
    let estimate = match estimate_population(report.total, report.unique) {
        Ok(e) => Some(e),
        Err(DiversityError::InsufficientDuplicates { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(CalibrationRecord {
        seed_index,
        total: report.total,
        unique: report.unique,
        estimate,
    })
}

/// Least-squares slope of a series against its index, for trend checks.
pub fn linear_slope(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = values.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &y) in values.iter().enumerate() {
        let dx = i as f64 - mean_x;
        num += dx * (y - mean_y);
        den += dx * dx;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}
