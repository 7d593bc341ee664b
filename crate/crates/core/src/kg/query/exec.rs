use std::collections::BTreeMap;

use super::ast::{NodePattern, Query};
use crate::kg::graph::{sort_triples, EdgeKey, Graph, Node, NodeRef, Triple};

/// Variable assignment for one match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub nodes: BTreeMap<String, NodeRef>,
    pub edge: Option<EdgeKey>,
}

/// Label filter plus case-folded property equality.
pub fn node_matches(node: &Node, pat: &NodePattern) -> bool {
    if pat.label.as_ref().is_some_and(|l| *l != node.label) {
        return false;
    }
    pat.props
        .iter()
        .all(|(k, v)| node.props.get(k).is_some_and(|actual| actual.to_lowercase() == v.to_lowercase()))
}

fn candidates<'a>(g: &'a Graph, pat: &'a NodePattern) -> Box<dyn Iterator<Item = &'a Node> + 'a> {
    match &pat.label {
        Some(l) => Box::new(g.nodes_with_label(l).filter(move |n| node_matches(n, pat))),
        None => Box::new(g.nodes().filter(move |n| node_matches(n, pat))),
    }
}

pub fn execute_bindings(g: &Graph, q: &Query) -> Vec<Binding> {
    let mut out = Vec::new();
    for a in candidates(g, &q.start) {
        let ak = a.key();
        match &q.hop {
            None => out.push(Binding { nodes: BTreeMap::from([(q.start.var.clone(), ak)]), edge: None }),
            Some((e, pat)) => {
                for key in g.out_edges(&ak).filter(|k| k.rel == e.rel) {
                    let b = g.node(&key.dst).expect("edge endpoints exist");
                    if !node_matches(b, pat) || (pat.var == q.start.var && key.dst != ak) {
                        continue;
                    }
                    let nodes = BTreeMap::from([(q.start.var.clone(), ak.clone()), (pat.var.clone(), key.dst.clone())]);
                    out.push(Binding { nodes, edge: Some(key.clone()) });
                }
            }
        }
    }
    out
}

/// Matches as triples ordered by `(src id, rel, dst id)`. Node-only
/// patterns yield triples without a relation.
pub fn execute_query(g: &Graph, q: &Query) -> Vec<Triple> {
    let mut t: Vec<Triple> = execute_bindings(g, q)
        .into_iter()
        .map(|b| match &b.edge {
            Some(k) => g.edge_triple(k),
            None => g.node_triple(&b.nodes[&q.start.var]),
        })
        .collect();
    sort_triples(&mut t);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::graph::EdgeProps;
    use crate::kg::query::parse_query;

    fn fixture() -> Graph {
        let mut g = Graph::new();
        g.add_node(Node::new("Intent", "i1").with_prop("name", "Hủy lớp")).unwrap();
        g.add_node(Node::new("Intent", "i2").with_prop("name", "đăng_ký môn_học")).unwrap();
        g.add_node(Node::new("Policy", "p1").with_prop("name", "quy định rút môn")).unwrap();
        g.add_node(Node::new("Policy", "p2").with_prop("name", "quy chế đào tạo")).unwrap();
        let e = |a: &str, b: &str| (NodeRef::new("Intent", a), NodeRef::new("Policy", b));
        for (s, d) in [e("i1", "p1"), e("i2", "p2"), e("i2", "p1")] {
            g.add_edge(s, "RELATED_POLICY", d, EdgeProps::new()).unwrap();
        }
        g
    }

    fn run(g: &Graph, q: &str) -> Vec<Triple> {
        execute_query(g, &parse_query(q).unwrap())
    }

    #[test]
    fn single_matching_pair() {
        let t = run(&fixture(), r#"MATCH (i:Intent {name:"hủy lớp"})-[:RELATED_POLICY]->(p:Policy) RETURN i, p"#);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].dst.as_ref().unwrap().id, "p1");
    }

    #[test]
    fn diacritics_are_significant() {
        assert!(run(&fixture(), r#"MATCH (i {name:"huy lop"}) RETURN i"#).is_empty());
    }

    #[test]
    fn empty_graph_and_label_mismatch() {
        assert!(run(&Graph::new(), "MATCH (a) RETURN a").is_empty());
        assert!(run(&fixture(), "MATCH (a:Course) RETURN a").is_empty());
        assert!(run(&fixture(), "MATCH (a:Policy)-[:RELATED_POLICY]->(b) RETURN a").is_empty());
    }

    #[test]
    fn results_are_ordered() {
        let t = run(&fixture(), "MATCH (a)-[:RELATED_POLICY]->(b) RETURN a, b");
        let keys: Vec<(&str, &str)> = t.iter().map(|t| (t.src.id.as_str(), t.dst.as_ref().unwrap().id.as_str())).collect();
        assert_eq!(keys, vec![("i1", "p1"), ("i2", "p1"), ("i2", "p2")]);
        let nodes = run(&fixture(), "MATCH (a:Policy) RETURN a");
        assert_eq!(nodes.len(), 2);
        assert!(nodes[0].rel.is_none());
    }
}
