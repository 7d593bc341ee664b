use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::run::run_discover;
use crate::embed::ProviderConfig;
use crate::label::NgramRange;

/// One design-selection cell. Unset fields inherit from the base config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCell {
    pub id: String,
    #[serde(default)]
    pub embedding: Option<ProviderConfig>,
    pub n_neighbors: usize,
    pub n_components: usize,
    pub min_cluster_size: usize,
    pub ngram: NgramRange,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl GridCell {
    fn new(id: &str, embedding: Option<ProviderConfig>, nn: usize, nc: usize, mcs: usize, ngram: NgramRange) -> Self {
        GridCell { id: id.into(), embedding, n_neighbors: nn, n_components: nc, min_cluster_size: mcs, ngram, seed: None }
    }

    pub fn apply(&self, base: &PipelineConfig) -> PipelineConfig {
        let mut cfg = base.clone();
        if let Some(e) = &self.embedding {
            cfg.embedding = e.clone();
        }
        cfg.reduce.n_neighbors = self.n_neighbors;
        cfg.reduce.n_components = self.n_components;
        cfg.cluster.min_cluster_size = self.min_cluster_size;
        cfg.cluster.min_samples = self.min_cluster_size;
        cfg.label.ngram = self.ngram;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg
    }
}

/// The five design-selection experiments. The 3.x cells swap in
/// `alternate` as the embedding provider when one is given.
pub fn preset_cells(alternate: Option<ProviderConfig>) -> Vec<GridCell> {
    vec![
        GridCell::new("Experiment 1", None, 20, 4, 20, NgramRange::SHORT),
        GridCell::new("Experiment 2.1", None, 20, 4, 20, NgramRange::SHORT),
        GridCell::new("Experiment 2.2", None, 15, 9, 15, NgramRange::LONG),
        GridCell::new("Experiment 3.1", alternate.clone(), 20, 4, 20, NgramRange::SHORT),
        GridCell::new("Experiment 3.2", alternate, 15, 9, 15, NgramRange::LONG),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_clusters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_intents: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn cell_dir(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c.to_ascii_lowercase() } else { '_' }).collect()
}

/// Runs every cell into its own subdirectory, at most `jobs` at a time.
/// A failing cell is reported in its row and does not stop the others.
pub fn run_experiment_grid(base: &PipelineConfig, cells: &[GridCell], out_dir: &Path, jobs: usize) -> Vec<GridRow> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let cfg = cell.apply(base);
                match run_discover(&cfg, &out_dir.join(cell_dir(&cell.id))) {
                    Ok(out) => GridRow {
                        experiment: cell.id.clone(),
                        n_clusters: Some(out.report.n_clusters),
                        n_intents: Some(out.report.n_intents),
                        error: None,
                    },
                    Err(e) => GridRow { experiment: cell.id.clone(), n_clusters: None, n_intents: None, error: Some(e.to_string()) },
                }
            })
            .collect()
    })
}

/// Two-column text table of experiment and intents discovered.
pub fn format_grid(rows: &[GridRow]) -> String {
    let mut out = String::from("Experiment\tIntentions Discovered\n");
    for r in rows {
        let value = match (&r.n_intents, &r.error) {
            (Some(n), _) => n.to_string(),
            (None, Some(e)) => format!("error: {e}"),
            _ => "-".into(),
        };
        out.push_str(&format!("{}\t{}\n", r.experiment, value));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_follow_design_table() {
        let cells = preset_cells(None);
        let ids: Vec<&str> = cells.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["Experiment 1", "Experiment 2.1", "Experiment 2.2", "Experiment 3.1", "Experiment 3.2"]);
        assert_eq!((cells[0].n_neighbors, cells[0].n_components, cells[0].min_cluster_size), (20, 4, 20));
        assert_eq!((cells[4].n_neighbors, cells[4].n_components, cells[4].min_cluster_size), (15, 9, 15));
        assert_eq!(cells[4].ngram, NgramRange::LONG);
        assert_eq!(cell_dir("Experiment 2.1"), "experiment_2.1");
    }

    #[test]
    fn empty_grid_is_empty_table() {
        let base = PipelineConfig::parse("[corpus]\ninputs = [\"x\"]\n[label]\ntags = \"t\"", true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(run_experiment_grid(&base, &[], dir.path(), 2).is_empty());
        assert_eq!(format_grid(&[]), "Experiment\tIntentions Discovered\n");
    }

    #[test]
    fn failing_cells_are_reported() {
        let base = PipelineConfig::parse("[corpus]\ninputs = [\"missing.jsonl\"]\n[label]\ntags = \"t\"", true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let rows = run_experiment_grid(&base, &preset_cells(None)[..2], dir.path(), 2);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.error.as_deref().is_some_and(|e| e.contains("ingest"))));
    }
}
