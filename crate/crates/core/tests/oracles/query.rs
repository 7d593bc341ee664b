//! Query fixtures, random graphs and a scan-everything query evaluator.

use std::collections::BTreeSet;
use std::fs;

use forge_core::kg::query::NodePattern;
use forge_core::kg::{EdgeProps, Graph, Node, NodeRef, Query};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::fixture_path;

pub fn fixture(name: &str) -> String {
    let p = fixture_path(&format!("queries/{name}"));
    fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// `(query, expected offset)` rows of the malformed-query fixture.
pub fn malformed() -> Vec<(String, usize)> {
    fixture("malformed.tsv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (q, off) = l.rsplit_once('\t').unwrap();
            (q.to_string(), off.parse().unwrap())
        })
        .collect()
}

const LABELS: [&str; 3] = ["Intent", "Policy", "Topic"];
const RELS: [&str; 2] = ["R", "S"];
const NAMES: [&str; 4] = ["hủy lớp", "Hủy Lớp", "đăng_ký", "quy định"];

pub fn random_graph(rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new();
    let n = rng.random_range(1..=50);
    let mut keys = Vec::new();
    for i in 0..n {
        let label = *LABELS.choose(rng).unwrap();
        let mut node = Node::new(label, format!("n{i}"));
        if rng.random_bool(0.8) {
            node = node.with_prop("name", *NAMES.choose(rng).unwrap());
        }
        keys.push(node.key());
        g.add_node(node).unwrap();
    }
    for _ in 0..rng.random_range(0..3 * n) {
        let (a, b) = (keys.choose(rng).unwrap().clone(), keys.choose(rng).unwrap().clone());
        g.add_edge(a, RELS.choose(rng).unwrap(), b, EdgeProps::new()).unwrap();
    }
    g
}

pub fn random_pattern(rng: &mut ChaCha8Rng, var: &str) -> String {
    let mut s = format!("({var}");
    if rng.random_bool(0.5) {
        s += &format!(":{}", LABELS.choose(rng).unwrap());
    }
    if rng.random_bool(0.4) {
        s += &format!(" {{name: \"{}\"}}", NAMES.choose(rng).unwrap());
    }
    s + ")"
}

/// Plain scan over every node or edge, without the graph's indexes.
pub fn brute_force(g: &Graph, q: &Query) -> BTreeSet<(NodeRef, String, NodeRef)> {
    let fits = |n: &Node, p: &NodePattern| {
        p.label.as_ref().is_none_or(|l| *l == n.label)
            && p.props.iter().all(|(k, v)| n.props.get(k).is_some_and(|x| x.to_lowercase() == v.to_lowercase()))
    };
    let mut out = BTreeSet::new();
    match &q.hop {
        None => {
            for n in g.nodes().filter(|n| fits(n, &q.start)) {
                out.insert((n.key(), String::new(), NodeRef::new("", "")));
            }
        }
        Some((e, pat)) => {
            for (k, _) in g.edges() {
                let (a, b) = (g.node(&k.src).unwrap(), g.node(&k.dst).unwrap());
                let self_loop_ok = pat.var != q.start.var || k.src == k.dst;
                if k.rel == e.rel && fits(a, &q.start) && fits(b, pat) && self_loop_ok {
                    out.insert((k.src.clone(), k.rel.clone(), k.dst.clone()));
                }
            }
        }
    }
    out
}

/// A random query over the labels, relations and names used by `random_graph`.
pub fn random_query(rng: &mut ChaCha8Rng) -> String {
    if rng.random_bool(0.25) {
        format!("MATCH {} RETURN a", random_pattern(rng, "a"))
    } else {
        let b = if rng.random_bool(0.1) { "a" } else { "b" };
        let start = random_pattern(rng, "a");
        let rel = RELS.choose(rng).unwrap();
        format!("MATCH {start}-[:{rel}]->{} RETURN a", random_pattern(rng, b))
    }
}

/// Executor output as a set, failing on duplicate rows.
pub fn result_set(triples: Vec<forge_core::Triple>) -> Result<BTreeSet<(NodeRef, String, NodeRef)>, String> {
    let n = triples.len();
    let set: BTreeSet<_> = triples
        .into_iter()
        .map(|t| {
            let src = NodeRef::new(t.src.label, t.src.id);
            let dst = t.dst.map_or(NodeRef::new("", ""), |d| NodeRef::new(d.label, d.id));
            (src, t.rel.unwrap_or_default(), dst)
        })
        .collect();
    if set.len() != n {
        return Err(format!("{} duplicate rows", n - set.len()));
    }
    Ok(set)
}
