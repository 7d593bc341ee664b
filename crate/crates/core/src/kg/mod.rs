//! Property-graph store for intents, policies and hand-made domain entities.

mod build;
mod graph;
pub mod query;
mod retrieve;
mod snapshot;
mod verbalize;

pub use build::{build_graph, BuildOutput, ExtraGraph, INTENT, POLICY, RELATED_POLICY};
pub use graph::{is_identifier, sort_triples, EdgeKey, EdgeProps, Graph, Node, NodeProps, NodeRef, Triple, TripleEnd};
pub use query::{execute_query, parse_query, ParseError, Query};
pub use retrieve::{retrieve_triples, Retrieval};
pub use snapshot::{load_snapshot, parse_snapshot, save_snapshot, snapshot_lines, to_snapshot_string, SnapshotLine};
pub use verbalize::{display_name, verbalize, verbalize_one, TemplateTable};

#[derive(Debug, thiserror::Error)]
pub enum KgError {
    #[error("edge endpoint {0} does not exist")]
    DanglingEndpoint(String),
    #[error("{0:?} is not a valid label or relation name")]
    InvalidIdentifier(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("format error at {path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}
