use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::graph::{EdgeProps, Graph, Node, NodeProps, NodeRef};
use super::KgError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "t")]
pub enum SnapshotLine {
    #[serde(rename = "n")]
    Node {
        label: String,
        id: String,
        #[serde(default)]
        props: NodeProps,
    },
    #[serde(rename = "e")]
    Edge {
        src: NodeRef,
        rel: String,
        dst: NodeRef,
        #[serde(default)]
        props: EdgeProps,
    },
}

/// Canonical lines: nodes by `(label, id)`, then edges by `(src, rel, dst)`.
pub fn snapshot_lines(g: &Graph) -> Vec<SnapshotLine> {
    let mut out: Vec<SnapshotLine> = g
        .nodes()
        .map(|n| SnapshotLine::Node { label: n.label.clone(), id: n.id.clone(), props: n.props.clone() })
        .collect();
    out.extend(g.edges().map(|(k, p)| SnapshotLine::Edge {
        src: k.src.clone(),
        rel: k.rel.clone(),
        dst: k.dst.clone(),
        props: p.clone(),
    }));
    out
}

pub fn to_snapshot_string(g: &Graph) -> String {
    let mut s = String::new();
    for line in snapshot_lines(g) {
        s.push_str(&serde_json::to_string(&line).expect("snapshot lines serialize"));
        s.push('\n');
    }
    s
}

pub fn save_snapshot(g: &Graph, path: &Path) -> Result<(), KgError> {
    let io = |e: std::io::Error| KgError::Io { path: path.display().to_string(), message: e.to_string() };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(to_snapshot_string(g).as_bytes()).map_err(io)?;
    Ok(())
}

/// Parses snapshot text. Nodes may appear in any order relative to edges;
/// an edge naming a missing node is a format error on its line. A leading
/// `_meta` header line is skipped.
pub fn parse_snapshot(text: &str, name: &str) -> Result<Graph, KgError> {
    let fail = |line: usize, message: String| KgError::Format { path: name.to_string(), line, message };
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() || (i == 0 && raw.starts_with("{\"_meta\"")) {
            continue;
        }
        match serde_json::from_str::<SnapshotLine>(raw).map_err(|e| fail(i + 1, e.to_string()))? {
            SnapshotLine::Node { label, id, props } => nodes.push((i + 1, Node { label, id, props })),
            SnapshotLine::Edge { src, rel, dst, props } => edges.push((i + 1, src, rel, dst, props)),
        }
    }
    let mut g = Graph::new();
    for (line, node) in nodes {
        g.add_node(node).map_err(|e| fail(line, e.to_string()))?;
    }
    for (line, src, rel, dst, props) in edges {
        g.add_edge(src, &rel, dst, props).map_err(|e| fail(line, e.to_string()))?;
    }
    Ok(g)
}

pub fn load_snapshot(path: &Path) -> Result<Graph, KgError> {
    let text = fs::read_to_string(path)
        .map_err(|e| KgError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_snapshot(&text, &path.display().to_string())
}
