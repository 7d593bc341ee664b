use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ClusterError;
use crate::embed::euclidean;

/// A spanning-tree edge with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MstEdge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

fn check_dims<V: AsRef<[f64]>>(points: &[V]) -> Result<(), ClusterError> {
    let dim = points.first().map_or(0, |p| p.as_ref().len());
    match points.iter().find(|p| p.as_ref().len() != dim) {
        Some(p) => Err(ClusterError::DimensionMismatch { expected: dim, actual: p.as_ref().len() }),
        None => Ok(()),
    }
}

fn dist<V: AsRef<[f64]>>(points: &[V], a: usize, b: usize) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    euclidean(points[lo].as_ref(), points[hi].as_ref())
}

/// Distance from each point to its `min_samples`-th nearest other point.
pub fn core_distances<V: AsRef<[f64]> + Sync>(points: &[V], min_samples: usize) -> Result<Vec<f64>, ClusterError> {
    let n = points.len();
    if min_samples == 0 || min_samples >= n {
        return Err(ClusterError::TooFewPoints { min_samples, n });
    }
    check_dims(points)?;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist(points, i, j)).collect();
            let (_, kth, _) = d.select_nth_unstable_by(min_samples - 1, f64::total_cmp);
            *kth
        })
        .collect())
}

/// `max(core(a), core(b), d(a, b))`.
pub fn mutual_reachability<V: AsRef<[f64]>>(points: &[V], core: &[f64], a: usize, b: usize) -> f64 {
    core[a].max(core[b]).max(dist(points, a, b))
}

/// Minimum spanning tree of the mutual-reachability graph by dense Prim.
///
/// Edges are compared by `(weight, i, j)`, which makes the tree unique.
/// Edges are returned in the order Prim adds them.
pub fn mutual_reachability_mst<V: AsRef<[f64]> + Sync>(points: &[V], core: &[f64]) -> Result<Vec<MstEdge>, ClusterError> {
    let n = points.len();
    check_dims(points)?;
    if core.len() != n {
        return Err(ClusterError::InvalidParams(format!("{} core distances for {n} points", core.len())));
    }
    if n <= 1 {
        return Ok(Vec::new());
    }
    type Key = (f64, usize, usize);
    let less = |a: &Key, b: &Key| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).is_lt();

    let mut in_tree = vec![false; n];
    let mut best: Vec<Key> = vec![(f64::INFINITY, usize::MAX, usize::MAX); n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut current = 0usize;
    in_tree[0] = true;
    for _ in 1..n {
        let updates: Vec<(usize, Key)> = (0..n)
            .into_par_iter()
            .filter(|&v| !in_tree[v])
            .map(|v| {
                let w = mutual_reachability(points, core, current, v);
                (v, (w, current.min(v), current.max(v)))
            })
            .collect();
        for (v, cand) in updates {
            if less(&cand, &best[v]) {
                best[v] = cand;
            }
        }
        let next = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| {
                let (ka, kb) = (&best[a], &best[b]);
                if less(ka, kb) {
                    std::cmp::Ordering::Less
                } else if less(kb, ka) {
                    std::cmp::Ordering::Greater
                } else {
                    a.cmp(&b)
                }
            })
            .expect("at least one vertex outside the tree");
        let (w, i, j) = best[next];
        edges.push(MstEdge { i, j, weight: w });
        in_tree[next] = true;
        current = next;
    }
    Ok(edges)
}
