use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::KgError;

pub type NodeProps = BTreeMap<String, String>;
pub type EdgeProps = BTreeMap<String, Value>;

/// `(label, id)` identity of a node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeRef {
    pub label: String,
    pub id: String,
}

impl NodeRef {
    pub fn new(label: impl Into<String>, id: impl Into<String>) -> Self {
        NodeRef { label: label.into(), id: id.into() }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.label, self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub label: String,
    pub id: String,
    #[serde(default)]
    pub props: NodeProps,
}

impl Node {
    pub fn new(label: impl Into<String>, id: impl Into<String>) -> Self {
        Node { label: label.into(), id: id.into(), props: NodeProps::new() }
    }

    pub fn with_prop(mut self, key: &str, value: impl Into<String>) -> Self {
        self.props.insert(key.to_string(), value.into());
        self
    }

    pub fn key(&self) -> NodeRef {
        NodeRef::new(self.label.clone(), self.id.clone())
    }

    /// The `name` property, falling back to the id.
    pub fn name(&self) -> &str {
        self.props.get("name").map(String::as_str).unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    pub src: NodeRef,
    pub rel: String,
    pub dst: NodeRef,
}

/// One end of a [`Triple`], with its display name resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleEnd {
    pub label: String,
    pub id: String,
    pub name: String,
}

/// An edge with resolved endpoints. Node-only query results have no `rel`/`dst`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub src: TripleEnd,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dst: Option<TripleEnd>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub props: EdgeProps,
}

impl Triple {
    pub fn sort_key(&self) -> (&str, &str, &str, &str, &str) {
        let rel = self.rel.as_deref().unwrap_or("");
        let (dl, di) = self.dst.as_ref().map(|d| (d.label.as_str(), d.id.as_str())).unwrap_or(("", ""));
        (&self.src.id, rel, di, &self.src.label, dl)
    }
}

pub fn sort_triples(triples: &mut [Triple]) {
    triples.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// In-memory property graph with label, id and relation indexes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Graph {
    nodes: BTreeMap<NodeRef, Node>,
    edges: BTreeMap<EdgeKey, EdgeProps>,
    by_label: BTreeMap<String, BTreeSet<NodeRef>>,
    by_id: BTreeMap<String, BTreeSet<NodeRef>>,
    by_rel: BTreeMap<String, BTreeSet<EdgeKey>>,
    out: BTreeMap<NodeRef, BTreeSet<EdgeKey>>,
    inc: BTreeMap<NodeRef, BTreeSet<EdgeKey>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a node. Returns `Ok(false)` and leaves the graph unchanged when
    /// the `(label, id)` pair already exists.
    pub fn add_node(&mut self, node: Node) -> Result<bool, KgError> {
        if !is_identifier(&node.label) {
            return Err(KgError::InvalidIdentifier(node.label));
        }
        let key = node.key();
        if self.nodes.contains_key(&key) {
            log::warn!("duplicate node {key} ignored");
            return Ok(false);
        }
        self.by_label.entry(key.label.clone()).or_default().insert(key.clone());
        self.by_id.entry(key.id.clone()).or_default().insert(key.clone());
        self.nodes.insert(key, node);
        Ok(true)
    }

    /// Inserts an edge between existing nodes. Duplicate `(src, rel, dst)`
    /// edges are ignored with a warning and `Ok(false)`.
    pub fn add_edge(&mut self, src: NodeRef, rel: &str, dst: NodeRef, props: EdgeProps) -> Result<bool, KgError> {
        if !is_identifier(rel) {
            return Err(KgError::InvalidIdentifier(rel.to_string()));
        }
        for end in [&src, &dst] {
            if !self.nodes.contains_key(end) {
                return Err(KgError::DanglingEndpoint(end.to_string()));
            }
        }
        let key = EdgeKey { src, rel: rel.to_string(), dst };
        if self.edges.contains_key(&key) {
            log::warn!("duplicate edge {} -[{}]-> {} ignored", key.src, key.rel, key.dst);
            return Ok(false);
        }
        self.by_rel.entry(key.rel.clone()).or_default().insert(key.clone());
        self.out.entry(key.src.clone()).or_default().insert(key.clone());
        self.inc.entry(key.dst.clone()).or_default().insert(key.clone());
        self.edges.insert(key, props);
        Ok(true)
    }

    pub fn node(&self, key: &NodeRef) -> Option<&Node> {
        self.nodes.get(key)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EdgeKey, &EdgeProps)> {
        self.edges.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_props(&self, key: &EdgeKey) -> Option<&EdgeProps> {
        self.edges.get(key)
    }

    pub fn nodes_with_label<'a>(&'a self, label: &str) -> impl Iterator<Item = &'a Node> + 'a {
        self.by_label.get(label).into_iter().flatten().map(|k| &self.nodes[k])
    }

    pub fn nodes_with_id<'a>(&'a self, id: &str) -> impl Iterator<Item = &'a Node> + 'a {
        self.by_id.get(id).into_iter().flatten().map(|k| &self.nodes[k])
    }

    pub fn edges_with_rel<'a>(&'a self, rel: &str) -> impl Iterator<Item = &'a EdgeKey> + 'a {
        self.by_rel.get(rel).into_iter().flatten()
    }

    pub fn out_edges<'a>(&'a self, node: &NodeRef) -> impl Iterator<Item = &'a EdgeKey> + 'a {
        self.out.get(node).into_iter().flatten()
    }

    pub fn in_edges<'a>(&'a self, node: &NodeRef) -> impl Iterator<Item = &'a EdgeKey> + 'a {
        self.inc.get(node).into_iter().flatten()
    }

    fn end(&self, key: &NodeRef) -> TripleEnd {
        let name = self.nodes.get(key).map(|n| n.name().to_string()).unwrap_or_else(|| key.id.clone());
        TripleEnd { label: key.label.clone(), id: key.id.clone(), name }
    }

    pub fn node_triple(&self, key: &NodeRef) -> Triple {
        Triple { src: self.end(key), rel: None, dst: None, props: EdgeProps::new() }
    }

    pub fn edge_triple(&self, key: &EdgeKey) -> Triple {
        Triple {
            src: self.end(&key.src),
            rel: Some(key.rel.clone()),
            dst: Some(self.end(&key.dst)),
            props: self.edges.get(key).cloned().unwrap_or_default(),
        }
    }

    /// Every edge as a triple, in canonical order.
    pub fn triples(&self) -> Vec<Triple> {
        let mut t: Vec<Triple> = self.edges.keys().map(|k| self.edge_triple(k)).collect();
        sort_triples(&mut t);
        t
    }
}
