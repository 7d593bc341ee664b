//! End-to-end runs: configuration, artifact headers, stage wiring and the
//! design-selection grid.

mod artifact;
mod config;
mod grid;
mod run;

pub use artifact::{
    ensure_same_run, read_artifact, snapshot_with_meta, write_artifact, ClusterRecord, EmbeddingRecord, Meta, PointRecord, SCHEMA};
pub use config::{content_hash, LabelStage, PipelineConfig, RelateStage};
pub use grid::{format_grid, preset_cells, run_experiment_grid, GridCell, GridRow};
pub use run::{
    assignments_for, check_inputs, make_tagger, run_cluster, run_discover, run_embed, run_ingest, run_reduce, GraphCounts,
    RunOutput, RunReport, REPORT_SCHEMA,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("artifact error: {0}")]
    Artifact(String),
    #[error("{second} was written by run {found}, but {first} by run {expected}")]
    HashMismatch { first: String, second: String, expected: String, found: String },
}

impl PipelineError {
    /// Process exit status: 2 for configuration problems, 3 for stage failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::HashMismatch { .. } => 2,
            PipelineError::Stage { .. } | PipelineError::Artifact(_) => 3,
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            PipelineError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}
