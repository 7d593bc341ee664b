use rayon::prelude::*;

use super::{check_dims, ReduceError};
use crate::embed::euclidean;

/// Exact k-nearest-neighbour lists (the point itself excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    pub indices: Vec<Vec<usize>>,
    pub distances: Vec<Vec<f64>>,
}

impl Knn {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn k(&self) -> usize {
        self.indices.first().map_or(0, Vec::len)
    }
}

/// Brute-force Euclidean kNN; ties broken by lower index.
pub fn knn_graph<V: AsRef<[f64]> + Sync>(vectors: &[V], k: usize) -> Result<Knn, ReduceError> {
    let n = vectors.len();
    if k == 0 || k >= n {
        return Err(ReduceError::KTooLarge { k, n });
    }
    check_dims(vectors)?;
    let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = vectors[i].as_ref();
            let mut cand: Vec<(f64, usize)> =
                (0..n).filter(|&j| j != i).map(|j| (euclidean(a, vectors[j].as_ref()), j)).collect();
            let cmp = |x: &(f64, usize), y: &(f64, usize)| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1));
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, cmp);
                cand.truncate(k);
            }
            cand.sort_by(cmp);
            cand.into_iter().map(|(d, j)| (j, d)).unzip()
        })
        .collect();
    let (indices, distances) = rows.into_iter().unzip();
    Ok(Knn { indices, distances })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_example() {
        let pts = [vec![0.0], vec![1.0], vec![3.0]];
        let knn = knn_graph(&pts, 1).unwrap();
        assert_eq!(knn.indices, vec![vec![1], vec![0], vec![1]]);
        assert_eq!(knn.distances, vec![vec![1.0], vec![1.0], vec![2.0]]);
    }

    #[test]
    fn k_must_be_below_n() {
        let pts = [vec![0.0], vec![1.0]];
        assert_eq!(knn_graph(&pts, 2), Err(ReduceError::KTooLarge { k: 2, n: 2 }));
    }

    #[test]
    fn duplicates_and_ties() {
        let pts = [vec![0.0], vec![0.0], vec![1.0], vec![-1.0]];
        let knn = knn_graph(&pts, 2).unwrap();
        assert_eq!(knn.indices[0], vec![1, 2]);
        assert_eq!(knn.distances[0], vec![0.0, 1.0]);
    }

    #[test]
    fn matches_full_sort() {
        let pts: Vec<Vec<f64>> = (0..40).map(|i| vec![((i * 37) % 17) as f64, ((i * 11) % 7) as f64]).collect();
        let knn = knn_graph(&pts, 5).unwrap();
        for i in 0..pts.len() {
            let mut all: Vec<(f64, usize)> =
                (0..pts.len()).filter(|&j| j != i).map(|j| (euclidean(&pts[i], &pts[j]), j)).collect();
            all.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
            let expected: Vec<usize> = all.iter().take(5).map(|x| x.1).collect();
            assert_eq!(knn.indices[i], expected);
        }
    }
}
