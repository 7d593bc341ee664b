//! Open intent discovery and knowledge-graph construction for student-care text.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] splits, word-joins and anonymizes raw documents into utterances.
//! * [`embed`] turns utterances into unit-norm vectors.
//! * [`reduce`] lowers dimensionality (UMAP, with PCA as a baseline).
//! * [`cluster`] groups reduced points with HDBSCAN.
//! * [`label`] names clusters from cTF-IDF keywords and dependency tags.
//! * [`relate`] links intents to policy documents.
//! * [`kg`] stores the resulting graph and answers pattern queries over it.
//! * [`rag`] assembles graph facts into prompts for an LLM client.
//! * [`pipeline`] wires the stages together and runs experiment grids.

pub mod cluster;
pub mod corpus;
pub mod embed;
pub mod http;
pub mod jsonl;
pub mod kg;
pub mod label;
pub mod pipeline;
pub mod rag;
pub mod reduce;
pub mod relate;
pub mod tfidf;

pub use cluster::{hdbscan, ClusterAssignment, ClusterParams};
pub use corpus::{RawDocument, Source, Utterance};
pub use embed::{cosine, EmbeddingProvider, Vector};
pub use kg::{Graph, Triple};
pub use label::{IntentEntity, TaggedToken};
pub use reduce::{umap, ReduceParams};
pub use relate::{PolicyEntity, Relation, RelationReport};

