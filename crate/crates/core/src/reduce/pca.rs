use nalgebra::{DMatrix, SymmetricEigen};

use super::{check_dims, ReduceError};

/// A fitted principal component projection.
#[derive(Debug, Clone)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// One unit-length row per component, in decreasing variance order.
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
}

impl Pca {
    pub fn fit<V: AsRef<[f64]>>(vectors: &[V], n_components: usize) -> Result<Self, ReduceError> {
        let n = vectors.len();
        if n < 2 {
            return Err(ReduceError::TooFewPoints { needed: 2, got: n });
        }
        let dim = check_dims(vectors)?;
        if n_components == 0 || n_components > dim {
            return Err(ReduceError::InvalidParams(format!("n_components must lie in 1..={dim}")));
        }
        let mut mean = vec![0.0; dim];
        for v in vectors {
            for (m, x) in mean.iter_mut().zip(v.as_ref()) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let centered = DMatrix::from_fn(n, dim, |i, j| vectors[i].as_ref()[j] - mean[j]);
        let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let total: f64 = eig.eigenvalues.iter().map(|v| v.max(0.0)).sum();

        let mut components = Vec::with_capacity(n_components);
        let mut explained_variance = Vec::with_capacity(n_components);
        for &k in order.iter().take(n_components) {
            let mut row: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let pivot = row
                .iter()
                .enumerate()
                .fold((0usize, 0.0f64), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best })
                .0;
            if row[pivot] < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            components.push(row);
            explained_variance.push(eig.eigenvalues[k].max(0.0));
        }
        let explained_variance_ratio =
            explained_variance.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect();
        Ok(Pca { mean, components, explained_variance, explained_variance_ratio })
    }

    pub fn transform<V: AsRef<[f64]>>(&self, vectors: &[V]) -> Vec<Vec<f64>> {
        vectors
            .iter()
            .map(|v| {
                self.components
                    .iter()
                    .map(|c| c.iter().zip(v.as_ref()).zip(&self.mean).map(|((w, x), m)| w * (x - m)).sum())
                    .collect()
            })
            .collect()
    }
}

/// Projects mean-centred `vectors` onto their top `n_components` principal axes.
pub fn pca<V: AsRef<[f64]>>(vectors: &[V], n_components: usize) -> Result<Vec<Vec<f64>>, ReduceError> {
    Ok(Pca::fit(vectors, n_components)?.transform(vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::euclidean;

    #[test]
    fn diagonal_line_example() {
        let pts = [vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        let out = pca(&pts, 1).unwrap();
        let s = 2f64.sqrt();
        for (got, want) in out.iter().zip([-s, 0.0, s]) {
            assert!((got[0] - want).abs() < 1e-9, "{got:?} vs {want}");
        }
    }

    #[test]
    fn collinear_points_have_one_component() {
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 3.0 * i as f64 - 1.0]).collect();
        let model = Pca::fit(&pts, 2).unwrap();
        assert!((model.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_rank_projection_preserves_distances() {
        let pts: Vec<Vec<f64>> =
            (0..15).map(|i| vec![(i as f64).sin(), (i as f64 * 0.3).cos() * 2.0, i as f64 * 0.1]).collect();
        let out = pca(&pts, 3).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                assert!((euclidean(&pts[i], &pts[j]) - euclidean(&out[i], &out[j])).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn components_are_orthonormal() {
        let pts: Vec<Vec<f64>> = (0..20)
            .map(|i| (0..5).map(|d| ((i * (d + 2)) % 7) as f64 + 0.1 * d as f64).collect())
            .collect();
        let model = Pca::fit(&pts, 4).unwrap();
        for (a, ca) in model.components.iter().enumerate() {
            for (b, cb) in model.components.iter().enumerate() {
                let dot: f64 = ca.iter().zip(cb).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn needs_two_points() {
        assert!(matches!(pca(&[vec![1.0]], 1), Err(ReduceError::TooFewPoints { .. })));
    }
}
