use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_dims, fit_ab, fuzzy_graph, knn_graph, ReduceError, ReduceParams, DEFAULT_A, DEFAULT_B};
use crate::embed::{fnv1a64, squared_euclidean};

const NEGATIVE_SAMPLE_RATE: f64 = 5.0;
const GRAD_CLIP: f64 = 4.0;
const INIT_RANGE: f64 = 10.0;

/// Embeds `vectors` into `params.n_components` dimensions.
///
/// Point `i` is keyed by its index; see [`umap_keyed`] for stable keys.
pub fn umap<V: AsRef<[f64]> + Sync>(vectors: &[V], params: &ReduceParams) -> Result<Vec<Vec<f64>>, ReduceError> {
    let keys: Vec<u64> = (0..vectors.len() as u64).collect();
    layout(vectors, &keys, params)
}

/// Like [`umap`], but the random streams of each point (initial position and
/// negative samples) are keyed by `ids`, and points are processed in id
/// order. Permuting the inputs permutes the output rows identically.
pub fn umap_keyed<V: AsRef<[f64]> + Sync>(
    vectors: &[V],
    ids: &[&str],
    params: &ReduceParams,
) -> Result<Vec<Vec<f64>>, ReduceError> {
    assert_eq!(vectors.len(), ids.len(), "one id per vector");
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| ids[a].cmp(ids[b]));
    let sorted: Vec<&[f64]> = order.iter().map(|&i| vectors[i].as_ref()).collect();
    let keys: Vec<u64> = order.iter().map(|&i| fnv1a64(0, ids[i].as_bytes())).collect();
    let embedded = layout(&sorted, &keys, params)?;
    let mut out = vec![Vec::new(); vectors.len()];
    for (row, &orig) in embedded.into_iter().zip(&order) {
        out[orig] = row;
    }
    Ok(out)
}

fn stream_seed(seed: u64, key: u64, salt: u64) -> u64 {
    // splitmix64 finalizer over the combined inputs
    let mut z = seed ^ key.rotate_left(17) ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn layout<V: AsRef<[f64]> + Sync>(vectors: &[V], keys: &[u64], params: &ReduceParams) -> Result<Vec<Vec<f64>>, ReduceError> {
    params.validate()?;
    let n = vectors.len();
    if n < params.n_neighbors + 1 {
        return Err(ReduceError::TooFewPoints { needed: params.n_neighbors + 1, got: n });
    }
    check_dims(vectors)?;
    let knn = knn_graph(vectors, params.n_neighbors - 1)?;
    let graph = fuzzy_graph(&knn, params.n_neighbors);
    let (a, b) = if params.min_dist == 0.1 { (DEFAULT_A, DEFAULT_B) } else { fit_ab(params.min_dist, 1.0) };
    let dim = params.n_components;

    let mut emb: Vec<Vec<f64>> = keys
        .iter()
        .map(|&k| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(params.seed, k, 1));
            (0..dim).map(|_| rng.random_range(-INIT_RANGE..INIT_RANGE)).collect()
        })
        .collect();
    let mut neg_rngs: Vec<ChaCha8Rng> =
        keys.iter().map(|&k| ChaCha8Rng::seed_from_u64(stream_seed(params.seed, k, 2))).collect();

    let n_epochs = params.n_epochs as f64;
    let w_max = graph.edges.iter().map(|e| e.2).fold(0.0f64, f64::max);
    let mut heads = Vec::new();
    let mut tails = Vec::new();
    let mut eps = Vec::new();
    for &(i, j, w) in &graph.edges {
        if w < w_max / n_epochs {
            continue;
        }
        for (h, t) in [(i, j), (j, i)] {
            heads.push(h);
            tails.push(t);
            eps.push(w_max / w);
        }
    }
    let mut order: Vec<usize> = (0..heads.len()).collect();
    order.sort_by_key(|&e| (heads[e], tails[e]));

    let eps_neg: Vec<f64> = eps.iter().map(|e| e / NEGATIVE_SAMPLE_RATE).collect();
    let mut next_sample = eps.clone();
    let mut next_neg = eps_neg.clone();
    let mut grad = vec![0.0f64; dim];

    for epoch in 0..params.n_epochs {
        let alpha = 1.0 - epoch as f64 / n_epochs;
        let epoch_f = epoch as f64;
        for &e in &order {
            if next_sample[e] > epoch_f {
                continue;
            }
            let (j, k) = (heads[e], tails[e]);
            let dist_sq = squared_euclidean(&emb[j], &emb[k]);
            let coeff = if dist_sq > 0.0 {
                -2.0 * a * b * dist_sq.powf(b - 1.0) / (a * dist_sq.powf(b) + 1.0)
            } else {
                0.0
            };
            for d in 0..dim {
                grad[d] = (coeff * (emb[j][d] - emb[k][d])).clamp(-GRAD_CLIP, GRAD_CLIP) * alpha;
            }
            for d in 0..dim {
                emb[j][d] += grad[d];
                emb[k][d] -= grad[d];
            }
            next_sample[e] += eps[e];

            let n_neg = ((epoch_f - next_neg[e]) / eps_neg[e]).floor().max(0.0) as usize;
            for _ in 0..n_neg {
                let other = neg_rngs[j].random_range(0..n);
                if other == j {
                    continue;
                }
                let dist_sq = squared_euclidean(&emb[j], &emb[other]);
                let coeff = if dist_sq > 0.0 {
                    2.0 * b / ((0.001 + dist_sq) * (a * dist_sq.powf(b) + 1.0))
                } else {
                    0.0
                };
                for (d, g) in grad.iter_mut().enumerate() {
                    *g = if coeff > 0.0 {
                        (coeff * (emb[j][d] - emb[other][d])).clamp(-GRAD_CLIP, GRAD_CLIP)
                    } else {
                        GRAD_CLIP
                    };
                }
                for (x, g) in emb[j].iter_mut().zip(&grad) {
                    *x += g * alpha;
                }
            }
            next_neg[e] += n_neg as f64 * eps_neg[e];
        }
    }
    Ok(emb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(n_per: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::new();
        for c in 0..3 {
            for _ in 0..n_per {
                pts.push((0..6).map(|d| if d == c { 5.0 } else { 0.0 } + rng.random_range(-0.5..0.5)).collect());
            }
        }
        pts
    }

    #[test]
    fn shape_and_determinism() {
        let pts = blobs(20, 1);
        let params = ReduceParams { n_epochs: 50, ..Default::default() };
        let a = umap(&pts, &params).unwrap();
        let b = umap(&pts, &params).unwrap();
        assert_eq!(a.len(), 60);
        assert!(a.iter().all(|r| r.len() == 2));
        assert_eq!(a, b);
        let c = umap(&pts, &ReduceParams { seed: 7, ..params }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn too_few_points() {
        let pts = blobs(3, 1);
        let err = umap(&pts, &ReduceParams { n_neighbors: 15, ..Default::default() }).unwrap_err();
        assert_eq!(err, ReduceError::TooFewPoints { needed: 16, got: 9 });
    }

    #[test]
    fn keyed_layout_is_permutation_equivariant() {
        let pts = blobs(10, 3);
        let ids: Vec<String> = (0..pts.len()).map(|i| format!("u{i:03}")).collect();
        let params = ReduceParams { n_neighbors: 5, n_epochs: 30, ..Default::default() };
        let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let base = umap_keyed(&pts, &id_refs, &params).unwrap();
        let perm: Vec<usize> = (0..pts.len()).rev().collect();
        let p_pts: Vec<Vec<f64>> = perm.iter().map(|&i| pts[i].clone()).collect();
        let p_ids: Vec<&str> = perm.iter().map(|&i| id_refs[i]).collect();
        let permuted = umap_keyed(&p_pts, &p_ids, &params).unwrap();
        for (row, &i) in permuted.iter().zip(&perm) {
            assert_eq!(row, &base[i]);
        }
    }

    #[test]
    fn separated_blobs_stay_separated() {
        let pts = blobs(25, 5);
        let emb = umap(&pts, &ReduceParams { n_neighbors: 10, ..Default::default() }).unwrap();
        let centroid = |c: usize| -> Vec<f64> {
            let rows = &emb[c * 25..(c + 1) * 25];
            (0..2).map(|d| rows.iter().map(|r| r[d]).sum::<f64>() / 25.0).collect()
        };
        let spread = |c: usize| -> f64 {
            let m = centroid(c);
            emb[c * 25..(c + 1) * 25].iter().map(|r| squared_euclidean(r, &m).sqrt()).fold(0.0, f64::max)
        };
        for c1 in 0..3 {
            for c2 in c1 + 1..3 {
                let gap = squared_euclidean(&centroid(c1), &centroid(c2)).sqrt();
                assert!(gap > spread(c1).max(spread(c2)), "blobs {c1} and {c2} overlap");
            }
        }
    }
}
