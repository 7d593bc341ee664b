use std::collections::BTreeMap;

use super::Knn;

const SEARCH_ITERATIONS: usize = 64;
const SEARCH_TOLERANCE: f64 = 1e-5;
const SIGMA_MIN: f64 = 1e-8;
const SIGMA_MAX: f64 = 1e8;

/// Per-point smooth-kNN calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothKnn {
    /// Distance to the nearest neighbour.
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
}

fn membership_sum(dists: &[f64], rho: f64, sigma: f64) -> f64 {
    dists.iter().map(|&d| (-(d - rho).max(0.0) / sigma).exp()).sum()
}

/// Finds, for every row of `knn`, the bandwidth `sigma` such that the
/// memberships of its neighbours sum to `log2(n_neighbors)`.
///
/// `n_neighbors` counts the point itself, so rows normally hold
/// `n_neighbors - 1` entries.
pub fn smooth_knn(knn: &Knn, n_neighbors: usize) -> SmoothKnn {
    let target = (n_neighbors as f64).log2();
    let mut rho = Vec::with_capacity(knn.len());
    let mut sigma = Vec::with_capacity(knn.len());
    for dists in &knn.distances {
        let r = dists.first().copied().unwrap_or(0.0);
        let (mut lo, mut hi, mut mid) = (0.0f64, f64::INFINITY, 1.0f64);
        for _ in 0..SEARCH_ITERATIONS {
            let psum = membership_sum(dists, r, mid);
            if (psum - target).abs() < SEARCH_TOLERANCE {
                break;
            }
            if psum > target {
                hi = mid;
                mid = (lo + hi) / 2.0;
            } else {
                lo = mid;
                mid = if hi.is_infinite() { mid * 2.0 } else { (lo + hi) / 2.0 };
            }
        }
        rho.push(r);
        sigma.push(mid.clamp(SIGMA_MIN, SIGMA_MAX));
    }
    SmoothKnn { rho, sigma }
}

/// Symmetric weighted neighbourhood graph. Edges are stored once with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl FuzzyGraph {
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.edges
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .map(|idx| self.edges[idx].2)
            .unwrap_or(0.0)
    }
}

/// Builds the fuzzy union `a + b - a*b` of the directed smooth-kNN memberships.
pub fn fuzzy_graph(knn: &Knn, n_neighbors: usize) -> FuzzyGraph {
    let calib = smooth_knn(knn, n_neighbors);
    let mut pairs: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    for (i, (nbrs, dists)) in knn.indices.iter().zip(&knn.distances).enumerate() {
        for (&j, &d) in nbrs.iter().zip(dists) {
            if i == j {
                continue;
            }
            let w = (-(d - calib.rho[i]).max(0.0) / calib.sigma[i]).exp();
            if w <= 0.0 {
                continue;
            }
            let entry = pairs.entry((i.min(j), i.max(j))).or_insert((0.0, 0.0));
            if i < j {
                entry.0 = w;
            } else {
                entry.1 = w;
            }
        }
    }
    let edges = pairs
        .into_iter()
        .map(|((i, j), (a, b))| (i, j, (a + b - a * b).min(1.0)))
        .filter(|&(_, _, w)| w > 0.0)
        .collect();
    FuzzyGraph { n: knn.len(), edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::knn_graph;

    #[test]
    fn nearest_neighbour_has_full_membership() {
        let pts: Vec<Vec<f64>> = (0..12).map(|i| vec![(i as f64).powf(1.3), (i % 3) as f64]).collect();
        let knn = knn_graph(&pts, 4).unwrap();
        let calib = smooth_knn(&knn, 5);
        for (i, dists) in knn.distances.iter().enumerate() {
            let w = (-(dists[0] - calib.rho[i]).max(0.0) / calib.sigma[i]).exp();
            assert_eq!(w, 1.0);
        }
    }

    #[test]
    fn equidistant_triangle_meets_target() {
        let h = 3f64.sqrt() / 2.0;
        let pts = [vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]];
        let knn = knn_graph(&pts, 1).unwrap();
        let calib = smooth_knn(&knn, 2);
        for (i, dists) in knn.distances.iter().enumerate() {
            let sum = membership_sum(dists, calib.rho[i], calib.sigma[i]);
            assert!((sum - 2f64.log2()).abs() <= 1e-3);
        }
    }

    #[test]
    fn search_hits_target_on_spread_data() {
        let pts: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.7).sin() * 3.0, i as f64 * 0.1]).collect();
        let knn = knn_graph(&pts, 7).unwrap();
        let calib = smooth_knn(&knn, 8);
        for (i, dists) in knn.distances.iter().enumerate() {
            let sum = membership_sum(dists, calib.rho[i], calib.sigma[i]);
            assert!((sum - 3.0).abs() <= 1e-3, "point {i}: {sum}");
        }
    }

    #[test]
    fn graph_is_symmetric_without_self_loops() {
        let pts: Vec<Vec<f64>> = (0..25).map(|i| vec![(i * 7 % 11) as f64, (i * 3 % 5) as f64 * 0.5]).collect();
        let g = fuzzy_graph(&knn_graph(&pts, 5).unwrap(), 6);
        for &(i, j, w) in &g.edges {
            assert!(i < j);
            assert!(w > 0.0 && w <= 1.0);
            assert_eq!(g.weight(i, j), g.weight(j, i));
        }
    }
}
