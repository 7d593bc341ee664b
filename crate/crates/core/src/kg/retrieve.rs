use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::graph::{sort_triples, EdgeKey, Graph, Node, NodeRef, Triple};
use crate::tfidf::{sparse_dot, CorpusStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retrieval {
    pub anchors: Vec<NodeRef>,
    pub triples: Vec<Triple>,
    pub no_anchor: bool,
}

fn node_text(n: &Node) -> String {
    let mut parts = vec![n.name().to_string()];
    parts.extend(n.props.iter().filter(|(k, _)| k.as_str() != "name").map(|(_, v)| v.clone()));
    parts.join(" ")
}

/// Anchors the question on the best-scoring node(s) by tf-idf cosine over
/// node names and properties, then returns up to `k` of their incident edges.
pub fn retrieve_triples(g: &Graph, question: &str, k: usize) -> Retrieval {
    let nodes: Vec<&Node> = g.nodes().collect();
    let texts: Vec<String> = nodes.iter().map(|n| node_text(n)).collect();
    let stats = CorpusStats::new(&texts);
    let q = stats.vectorize(question);
    let scores: Vec<f64> = texts.iter().map(|t| sparse_dot(&q, &stats.vectorize(t))).collect();
    let best = scores.iter().copied().fold(0.0, f64::max);
    if best <= 0.0 {
        return Retrieval { anchors: vec![], triples: vec![], no_anchor: true };
    }
    let anchors: Vec<NodeRef> = nodes.iter().zip(&scores).filter(|(_, &s)| s == best).map(|(n, _)| n.key()).collect();
    let mut edges: BTreeSet<&EdgeKey> = BTreeSet::new();
    for a in &anchors {
        edges.extend(g.out_edges(a));
        edges.extend(g.in_edges(a));
    }
    let mut triples: Vec<Triple> = edges.into_iter().map(|e| g.edge_triple(e)).collect();
    sort_triples(&mut triples);
    triples.truncate(k);
    Retrieval { anchors, triples, no_anchor: false }
}
