//! Toolkit for generating idea pools from LLM endpoints and measuring their
//! diversity: pairwise cosine similarity, unique-idea counting, opportunity-space
//! estimation, exhaustion curves, and resampling significance tests.

pub mod diversity;
pub mod embedding;
pub mod generation;
pub mod model;
pub mod similarity;
pub mod simulation;
pub mod stats;

pub use diversity::{DedupConfig, PopulationEstimate, UniquenessReport};
pub use embedding::{EmbeddedPool, Embedder, ProviderConfig, Vector};
pub use model::{Idea, ModelParams, Pool};
pub use similarity::{SimilarityMatrix, SimilaritySeries};
pub use stats::TestResult;
