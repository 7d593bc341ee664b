use std::path::Path;

use serde_json::json;

use super::graph::{EdgeProps, Graph, Node, NodeRef};
use super::snapshot::SnapshotLine;
use super::KgError;
use crate::label::IntentEntity;
use crate::relate::{PolicyEntity, Relation};

pub const INTENT: &str = "Intent";
pub const POLICY: &str = "Policy";
pub const RELATED_POLICY: &str = "RELATED_POLICY";

/// Graph plus the duplicate warnings raised while building it.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildOutput {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

/// Intent and policy nodes, one `RELATED_POLICY` edge per relation, then
/// any hand-made extra nodes and edges. The first of any duplicate wins.
pub fn build_graph(
    intents: &[IntentEntity],
    policies: &[PolicyEntity],
    relations: &[Relation],
    extra: Option<&ExtraGraph>,
) -> Result<BuildOutput, KgError> {
    let mut g = Graph::new();
    let mut warnings = Vec::new();
    let add = |g: &mut Graph, node: Node, warnings: &mut Vec<String>| -> Result<(), KgError> {
        let key = node.key();
        if !g.add_node(node)? {
            warnings.push(format!("duplicate node {key}"));
        }
        Ok(())
    };
    for i in intents {
        let node = Node::new(INTENT, i.id.clone())
            .with_prop("name", i.label.clone())
            .with_prop("support", i.support.to_string());
        add(&mut g, node, &mut warnings)?;
    }
    for p in policies {
        let mut node = Node::new(POLICY, p.id.clone()).with_prop("name", p.title.clone());
        if !p.body.is_empty() {
            node = node.with_prop("body", p.body.clone());
        }
        add(&mut g, node, &mut warnings)?;
    }
    for r in relations {
        let props = EdgeProps::from([
            ("embed_score".to_string(), json!(r.embed_score)),
            ("rank".to_string(), json!(r.rank)),
            ("rerank_score".to_string(), json!(r.rerank_score)),
        ]);
        let (src, dst) = (NodeRef::new(INTENT, r.intent_id.clone()), NodeRef::new(POLICY, r.policy_id.clone()));
        let desc = format!("{src} -[{RELATED_POLICY}]-> {dst}");
        if !g.add_edge(src, RELATED_POLICY, dst, props)? {
            warnings.push(format!("duplicate edge {desc}"));
        }
    }
    if let Some(extra) = extra {
        for line in extra.lines.iter().cloned() {
            match line {
                SnapshotLine::Node { label, id, props } => add(&mut g, Node { label, id, props }, &mut warnings)?,
                SnapshotLine::Edge { src, rel, dst, props } => {
                    let desc = format!("{src} -[{rel}]-> {dst}");
                    if !g.add_edge(src, &rel, dst, props)? {
                        warnings.push(format!("duplicate edge {desc}"));
                    }
                }
            }
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(BuildOutput { graph: g, warnings })
}

/// Hand-made nodes and edges in snapshot format. Edge endpoints may refer
/// to intents or policies and are only checked when merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtraGraph {
    pub lines: Vec<SnapshotLine>,
}

impl ExtraGraph {
    pub fn parse(text: &str, name: &str) -> Result<Self, KgError> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            lines.push(serde_json::from_str(raw).map_err(|e| KgError::Format {
                path: name.to_string(),
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        Ok(ExtraGraph { lines })
    }

    pub fn load(path: &Path) -> Result<Self, KgError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| KgError::Io { path: name.clone(), message: e.to_string() })?;
        Self::parse(&text, &name)
    }
}
