//! Dimensionality reduction ahead of clustering.
//!
//! [`umap`] is implemented directly: exact kNN, smooth-kNN membership
//! strengths, fuzzy union, then a single-threaded SGD layout with negative
//! sampling. [`pca`] is kept as a linear baseline.

mod curve;
mod fuzzy;
mod knn;
mod layout;
mod pca;

use serde::{Deserialize, Serialize};

pub use curve::{fit_ab, DEFAULT_A, DEFAULT_B};
pub use fuzzy::{fuzzy_graph, smooth_knn, FuzzyGraph, SmoothKnn};
pub use knn::{knn_graph, Knn};
pub use layout::{umap, umap_keyed};
pub use pca::{pca, Pca};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ReduceError {
    #[error("k = {k} must be below the number of points ({n})")]
    KTooLarge { k: usize, n: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("vectors have inconsistent dimensions ({expected} vs {actual})")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReduceParams {
    /// Neighbourhood size, counting the point itself.
    pub n_neighbors: usize,
    pub n_components: usize,
    pub min_dist: f64,
    pub n_epochs: usize,
    pub seed: u64,
}

impl Default for ReduceParams {
    fn default() -> Self {
        ReduceParams { n_neighbors: 15, n_components: 2, min_dist: 0.1, n_epochs: 200, seed: 42 }
    }
}

impl ReduceParams {
    /// 20 neighbours, 4 components.
    pub fn preset_compact() -> Self {
        ReduceParams { n_neighbors: 20, n_components: 4, ..Default::default() }
    }

    /// 15 neighbours, 9 components.
    pub fn preset_wide() -> Self {
        ReduceParams { n_neighbors: 15, n_components: 9, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), ReduceError> {
        if self.n_neighbors < 2 {
            return Err(ReduceError::InvalidParams("n_neighbors must be >= 2".into()));
        }
        if self.n_components < 1 {
            return Err(ReduceError::InvalidParams("n_components must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.min_dist) {
            return Err(ReduceError::InvalidParams("min_dist must lie in [0, 1)".into()));
        }
        if self.n_epochs < 1 {
            return Err(ReduceError::InvalidParams("n_epochs must be >= 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_dims<V: AsRef<[f64]>>(vectors: &[V]) -> Result<usize, ReduceError> {
    let dim = vectors.first().map_or(0, |v| v.as_ref().len());
    for v in vectors {
        if v.as_ref().len() != dim {
            return Err(ReduceError::DimensionMismatch { expected: dim, actual: v.as_ref().len() });
        }
    }
    Ok(dim)
}
