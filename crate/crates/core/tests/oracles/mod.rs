//! Brute-force reference implementations used only by tests.
//!
//! Nothing here calls into the code under test.
#![allow(dead_code)]

pub mod elements;
pub mod pii;
pub mod query;

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Path of a file under the workspace `fixtures/` directory.
pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn pair_dist(points: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    dist(&points[a], &points[b])
}

/// Full mutual-reachability matrix with "k-th nearest other point" core distances.
pub fn mutual_reachability_matrix(points: &[Vec<f64>], min_samples: usize) -> Vec<Vec<f64>> {
    let n = points.len();
    let core: Vec<f64> = (0..n)
        .map(|i| {
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| pair_dist(points, i, j)).collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d[min_samples - 1]
        })
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { core[i].max(core[j]).max(pair_dist(points, i, j)) }).collect())
        .collect()
}

/// Minimum total weight over every spanning tree of the complete graph.
pub fn exhaustive_mst_weight(w: &[Vec<f64>]) -> f64 {
    let n = w.len();
    if n <= 1 {
        return 0.0;
    }
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut best = f64::INFINITY;
    let m = edges.len();
    // every subset of exactly n-1 edges that is acyclic is a spanning tree
    for mask in 0u32..(1u32 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let mut comp: Vec<usize> = (0..n).collect();
        let mut ok = true;
        let mut total = 0.0;
        for (e, &(i, j)) in edges.iter().enumerate() {
            if mask & (1 << e) == 0 {
                continue;
            }
            let (ci, cj) = (comp[i], comp[j]);
            if ci == cj {
                ok = false;
                break;
            }
            for c in comp.iter_mut() {
                if *c == cj {
                    *c = ci;
                }
            }
            total += w[i][j];
        }
        if ok && total < best {
            best = total;
        }
    }
    best
}

const LAMBDA_CAP: f64 = 1e300;

fn lambda(w: f64) -> f64 {
    if w > 0.0 {
        (1.0 / w).min(LAMBDA_CAP)
    } else {
        LAMBDA_CAP
    }
}

fn components(set: &[usize], mr: &[Vec<f64>], below: f64) -> Vec<Vec<usize>> {
    let mut seen = vec![false; set.len()];
    let mut out = Vec::new();
    for s in 0..set.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![set[s]];
        let mut queue = vec![s];
        while let Some(a) = queue.pop() {
            for b in 0..set.len() {
                if !seen[b] && mr[set[a]][set[b]] < below {
                    seen[b] = true;
                    comp.push(set[b]);
                    queue.push(b);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Smallest threshold at which `set` is connected using edges `<= t`.
fn connect_level(set: &[usize], mr: &[Vec<f64>]) -> f64 {
    let mut levels: Vec<f64> =
        set.iter().flat_map(|&a| set.iter().filter(move |&&b| b > a).map(move |&b| mr[a][b])).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    for &t in &levels {
        if components(set, mr, f64::from_bits(t.to_bits() + 1)).len() == 1 {
            return t;
        }
    }
    0.0
}

struct OCluster {
    parent: Option<usize>,
    birth: f64,
    children: Vec<usize>,
    stability: f64,
}

/// Reference HDBSCAN labels and probabilities computed from the full matrix.
pub fn reference_hdbscan(
    points: &[Vec<f64>],
    min_cluster_size: usize,
    min_samples: usize,
    allow_single: bool,
) -> (Vec<i64>, Vec<f64>) {
    let n = points.len();
    if n < min_cluster_size || n < 2 {
        return (vec![-1; n], vec![0.0; n]);
    }
    let mr = mutual_reachability_matrix(points, min_samples);
    let mut clusters = vec![OCluster { parent: None, birth: 0.0, children: vec![], stability: 0.0 }];
    let mut fell_from = vec![usize::MAX; n];
    let mut fell_at = vec![0.0; n];
    let mut work = vec![((0..n).collect::<Vec<usize>>(), 0usize)];
    while let Some((set, cid)) = work.pop() {
        let level = connect_level(&set, &mr);
        let lam = lambda(level);
        let parts = components(&set, &mr, level);
        let big: Vec<&Vec<usize>> = parts.iter().filter(|p| p.len() >= min_cluster_size).collect();
        for p in parts.iter().filter(|p| p.len() < min_cluster_size || big.is_empty()) {
            for &x in p {
                fell_from[x] = cid;
                fell_at[x] = lam;
                clusters[cid].stability += lam - clusters[cid].birth;
            }
        }
        if big.len() == 1 {
            work.push((big[0].clone(), cid));
        } else if big.len() > 1 {
            for p in big {
                let id = clusters.len();
                clusters.push(OCluster { parent: Some(cid), birth: lam, children: vec![], stability: 0.0 });
                clusters[cid].children.push(id);
                clusters[cid].stability += p.len() as f64 * (lam - clusters[cid].birth);
                work.push((p.clone(), id));
            }
        }
    }
    // bottom-up excess-of-mass selection; children always have larger ids
    let m = clusters.len();
    let mut chosen = vec![false; m];
    let mut best = vec![0.0; m];
    for c in (0..m).rev() {
        let kids: f64 = clusters[c].children.iter().map(|&k| best[k]).sum();
        let can = c != 0 || allow_single;
        if clusters[c].children.is_empty() {
            chosen[c] = can;
            best[c] = clusters[c].stability;
        } else if can && clusters[c].stability >= kids {
            chosen[c] = true;
            best[c] = clusters[c].stability;
            fn clear(c: usize, clusters: &[OCluster], chosen: &mut [bool]) {
                for &k in &clusters[c].children {
                    chosen[k] = false;
                    clear(k, clusters, chosen);
                }
            }
            clear(c, &clusters, &mut chosen);
        } else {
            best[c] = kids;
        }
    }
    let owner = |mut c: usize| -> Option<usize> {
        loop {
            if chosen[c] {
                return Some(c);
            }
            c = clusters[c].parent?;
        }
    };
    let assigned: Vec<Option<usize>> = (0..n).map(|p| owner(fell_from[p])).collect();
    let mut groups: Vec<(usize, usize, usize)> = (0..m)
        .filter_map(|c| {
            let mem: Vec<usize> = (0..n).filter(|&p| assigned[p] == Some(c)).collect();
            mem.first().map(|&f| (mem.len(), f, c))
        })
        .collect();
    groups.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut labels = vec![-1i64; n];
    let mut probs = vec![0.0; n];
    for (l, &(_, _, c)) in groups.iter().enumerate() {
        let mem: Vec<usize> = (0..n).filter(|&p| assigned[p] == Some(c)).collect();
        let top = mem.iter().map(|&p| fell_at[p]).fold(0.0, f64::max);
        for p in mem {
            labels[p] = l as i64;
            probs[p] = if top > 0.0 { fell_at[p].min(top) / top } else { 1.0 };
        }
    }
    (labels, probs)
}

/// Standard-normal sample via Box-Muller.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Gaussian blobs around `centers`, `per` points each, labels in blob order.
pub fn planted_blobs(centers: &[Vec<f64>], per: usize, sigma: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per {
            pts.push(center.iter().map(|&x| x + sigma * gaussian(&mut rng)).collect());
            labels.push(c);
        }
    }
    (pts, labels)
}

/// Best label agreement over all matchings of found clusters to planted ones.
pub fn best_agreement(found: &[i64], planted: &[usize], k: usize) -> f64 {
    fn perms(items: Vec<usize>) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let x = rest.remove(i);
            for mut p in perms(rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let mut best = 0usize;
    for p in perms((0..k).collect()) {
        let hits = found
            .iter()
            .zip(planted)
            .filter(|(&f, &t)| f >= 0 && (f as usize) < k && p[f as usize] == t)
            .count();
        best = best.max(hits);
    }
    best as f64 / planted.len() as f64
}

/// Trustworthiness of `low` as a layout of `high`, from full rank tables.
pub fn trustworthiness(high: &[Vec<f64>], low: &[Vec<f64>], k: usize) -> f64 {
    let n = high.len();
    let order = |data: &[Vec<f64>], i: usize| -> Vec<usize> {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| dist(&data[i], &data[a]).partial_cmp(&dist(&data[i], &data[b])).unwrap().then(a.cmp(&b)));
        others
    };
    let mut penalty = 0.0;
    for i in 0..n {
        let high_order = order(high, i);
        let mut rank = vec![0usize; n];
        for (r, &j) in high_order.iter().enumerate() {
            rank[j] = r + 1;
        }
        let high_nn: Vec<usize> = high_order[..k].to_vec();
        for &j in &order(low, i)[..k] {
            if !high_nn.contains(&j) {
                penalty += (rank[j] - k) as f64;
            }
        }
    }
    let (n, k) = (n as f64, k as f64);
    1.0 - 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0)) * penalty
}

/// Random instance generator for the HDBSCAN comparison.
pub fn random_instance(seed: u64) -> (Vec<Vec<f64>>, usize, usize, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=12usize);
    let dim = rng.random_range(1..=3usize);
    let integer_grid = rng.random_bool(0.5);
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| if integer_grid { rng.random_range(0..6) as f64 } else { rng.random_range(-5.0..5.0) })
                .collect()
        })
        .collect();
    let mcs = rng.random_range(2..=5usize);
    let ms = rng.random_range(1..=4usize).min(n.saturating_sub(1)).max(1);
    (pts, mcs, ms, rng.random_bool(0.3))
}
