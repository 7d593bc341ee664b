//! Synthetic inputs for the benchmarks.

use std::collections::BTreeMap;

use forge_core::kg::{EdgeProps, Graph, Node, NodeRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `k` Gaussian blobs of `per` points each in `dim` dimensions.
pub fn blobs(k: usize, per: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..k).map(|_| (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect()).collect();
    centers
        .iter()
        .flat_map(|c| {
            (0..per)
                .map(|_| c.iter().map(|x| x + rng.random_range(-1.0..1.0)).collect::<Vec<f64>>())
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Token lists grouped into `classes` clusters over a small vocabulary.
pub fn token_classes(classes: usize, docs: usize, seed: u64) -> BTreeMap<i64, Vec<Vec<String>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..classes as i64)
        .map(|c| {
            let docs = (0..docs)
                .map(|_| (0..12).map(|_| format!("w{}", rng.random_range(0..200) + c * 10)).collect())
                .collect();
            (c, docs)
        })
        .collect()
}

/// Intent → policy graph with `n` intents and `n / 2` policies.
pub fn intent_graph(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new();
    for i in 0..n {
        g.add_node(Node::new("Intent", format!("i{i}")).with_prop("name", format!("intent {}", i % 50))).unwrap();
    }
    for p in 0..n / 2 {
        g.add_node(Node::new("Policy", format!("p{p}")).with_prop("name", format!("policy {p}"))).unwrap();
    }
    for i in 0..n {
        for _ in 0..3 {
            let p = rng.random_range(0..n / 2);
            let (src, dst) = (NodeRef::new("Intent", format!("i{i}")), NodeRef::new("Policy", format!("p{p}")));
            g.add_edge(src, "RELATED_POLICY", dst, EdgeProps::new()).unwrap();
        }
    }
    g
}
