//! HDBSCAN over reduced points.
//!
//! The three stages are exposed separately: [`core_distances`],
//! [`mutual_reachability_mst`] (exact Prim, O(n^2)) and [`extract_clusters`],
//! which builds the single-linkage hierarchy, condenses it with
//! `min_cluster_size`, and selects clusters by excess of mass.
//!
//! Edges of equal weight are merged in one step, so a level at which a
//! cluster breaks into several pieces is treated as a single multi-way split
//! rather than an arbitrary sequence of binary ones.

mod condense;
mod mst;

use serde::{Deserialize, Serialize};

pub use condense::{extract_clusters, lambda_of, CondensedEntry};
pub use mst::{core_distances, mutual_reachability, mutual_reachability_mst, MstEdge};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ClusterError {
    #[error("need more than min_samples = {min_samples} points, got {n}")]
    TooFewPoints { min_samples: usize, n: usize },
    #[error("points have inconsistent dimensions ({expected} vs {actual})")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterParams {
    pub min_cluster_size: usize,
    pub min_samples: usize,
    #[serde(default)]
    pub allow_single_cluster: bool,
}

impl ClusterParams {
    /// `min_samples` defaults to `min_cluster_size`.
    pub fn new(min_cluster_size: usize) -> Self {
        ClusterParams { min_cluster_size, min_samples: min_cluster_size, allow_single_cluster: false }
    }

    pub fn validate(&self) -> Result<(), ClusterError> {
        if self.min_cluster_size < 2 {
            return Err(ClusterError::InvalidParams("min_cluster_size must be >= 2".into()));
        }
        if self.min_samples < 1 {
            return Err(ClusterError::InvalidParams("min_samples must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams::new(15)
    }
}

/// Cluster labels (`-1` is noise, clusters numbered by decreasing size) with
/// membership probabilities and the condensed tree they were selected from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<i64>,
    pub probabilities: Vec<f64>,
    pub condensed_tree: Vec<CondensedEntry>,
}

impl ClusterAssignment {
    pub fn all_noise(n: usize) -> Self {
        ClusterAssignment { labels: vec![-1; n], probabilities: vec![0.0; n], condensed_tree: Vec::new() }
    }

    pub fn n_clusters(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| (m + 1).max(0) as usize)
    }

    pub fn members(&self, cluster: i64) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &l)| l == cluster).map(|(i, _)| i).collect()
    }
}

/// Full HDBSCAN: core distances, mutual-reachability MST, extraction.
pub fn hdbscan<V: AsRef<[f64]> + Sync>(points: &[V], params: &ClusterParams) -> Result<ClusterAssignment, ClusterError> {
    params.validate()?;
    let n = points.len();
    if n < params.min_cluster_size {
        return Ok(ClusterAssignment::all_noise(n));
    }
    let core = core_distances(points, params.min_samples)?;
    let mst = mutual_reachability_mst(points, &core)?;
    Ok(extract_clusters(&mst, n, params))
}
