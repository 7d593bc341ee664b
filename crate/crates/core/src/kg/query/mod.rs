//! Pattern-query subset: `MATCH (v:Label {k:"v"})-[:REL]->(w) RETURN v, w`.

mod ast;
mod exec;
mod lexer;
mod parser;

pub use ast::{EdgePattern, NodePattern, Query};
pub use exec::{execute_bindings, execute_query, node_matches, Binding};
pub use lexer::{tokenize, Spanned, Tok};
pub use parser::parse_query;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}
