use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::cluster::ClusterParams;
use crate::corpus::CorpusConfig;
use crate::embed::ProviderConfig;
use crate::label::{ElementConfig, LabelConfig, NgramRange};
use crate::reduce::ReduceParams;
use crate::relate::RelateParams;

/// Hex SHA-256 of a value's JSON serialization.
pub fn content_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("value serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelStage {
    /// Pre-tagged TSV corpus.
    #[serde(default)]
    pub tags: Option<PathBuf>,
    /// Base URL of a `/tag` gateway, used when `tags` is unset.
    #[serde(default)]
    pub tagger_endpoint: Option<String>,
    #[serde(default)]
    pub ngram: NgramRange,
    #[serde(default = "default_top_keywords")]
    pub top_keywords: usize,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub elements: ElementConfig,
}

fn default_top_keywords() -> usize {
    10
}

fn default_reps() -> usize {
    7
}

impl Default for LabelStage {
    fn default() -> Self {
        LabelStage {
            tags: None,
            tagger_endpoint: None,
            ngram: NgramRange::default(),
            top_keywords: default_top_keywords(),
            reps: default_reps(),
            elements: ElementConfig::default(),
        }
    }
}

impl LabelStage {
    pub fn label_config(&self) -> LabelConfig {
        LabelConfig { ngram: self.ngram, top_keywords: self.top_keywords, reps: self.reps, elements: self.elements.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelateStage {
    pub policies: PathBuf,
    #[serde(default)]
    pub gold: Option<PathBuf>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Hand-made nodes and edges merged into the graph.
    #[serde(default)]
    pub extra_graph: Option<PathBuf>,
}

fn default_threshold() -> f64 {
    0.32
}

fn default_top_k() -> usize {
    10
}

fn default_alpha() -> f64 {
    0.5
}

impl RelateStage {
    pub fn params(&self) -> RelateParams {
        RelateParams { threshold: self.threshold, top_k: self.top_k, alpha: self.alpha }
    }
}

/// Full discover-run configuration. Relative paths are resolved against
/// the directory of the config file; the hash covers paths as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub corpus: CorpusConfig,
    #[serde(default)]
    pub embedding: ProviderConfig,
    #[serde(default)]
    pub reduce: ReduceParams,
    #[serde(default)]
    pub cluster: ClusterParams,
    #[serde(default)]
    pub label: LabelStage,
    #[serde(default)]
    pub relate: Option<RelateStage>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn parse(text: &str, toml_syntax: bool) -> Result<Self, PipelineError> {
        let cfg: PipelineConfig = if toml_syntax {
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?
        } else {
            serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?
        };
        Ok(cfg)
    }

    /// Reads a `.toml` or `.json` config file.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text =
            fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json");
        let mut cfg = Self::parse(&text, !is_json).map_err(|e| match e {
            PipelineError::Config(m) => PipelineError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.base_dir.join(p)
        } else {
            p.to_path_buf()
        }
    }

    /// Corpus settings with paths resolved.
    pub fn corpus_resolved(&self) -> CorpusConfig {
        let mut c = self.corpus.clone();
        c.resolve(&self.base_dir);
        c
    }

    /// Embedding provider settings with paths resolved.
    pub fn embedding_resolved(&self) -> ProviderConfig {
        match &self.embedding {
            ProviderConfig::File { path } => ProviderConfig::File { path: self.resolve(path) },
            other => other.clone(),
        }
    }

    /// Reduce parameters with the run seed applied.
    pub fn reduce_params(&self) -> ReduceParams {
        ReduceParams { seed: self.seed, ..self.reduce }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let cfg = |m: String| PipelineError::Config(m);
        if self.corpus.inputs.is_empty() {
            return Err(cfg("corpus.inputs is empty".into()));
        }
        self.reduce_params().validate().map_err(|e| cfg(format!("reduce: {e}")))?;
        self.cluster.validate().map_err(|e| cfg(format!("cluster: {e}")))?;
        if self.label.tags.is_none() && self.label.tagger_endpoint.is_none() {
            return Err(cfg("label needs either `tags` or `tagger_endpoint`".into()));
        }
        if self.label.reps == 0 || self.label.top_keywords == 0 {
            return Err(cfg("label.reps and label.top_keywords must be positive".into()));
        }
        NgramRange::new(self.label.ngram.lo, self.label.ngram.hi).map_err(|e| cfg(format!("label: {e}")))?;
        if let Some(r) = &self.relate {
            r.params().validate().map_err(|e| cfg(format!("relate: {e}")))?;
        }
        Ok(())
    }

    /// Input files grouped by the stage that reads them.
    pub fn referenced_files(&self) -> Vec<(&'static str, PathBuf)> {
        let c = self.corpus_resolved();
        let mut out: Vec<(&'static str, PathBuf)> = c.inputs.into_iter().map(|p| ("ingest", p)).collect();
        out.extend([c.lexicon, c.abbreviations, c.names].into_iter().flatten().map(|p| ("ingest", p)));
        if let ProviderConfig::File { path } = self.embedding_resolved() {
            out.push(("embed", path));
        }
        if let Some(t) = &self.label.tags {
            out.push(("label", self.resolve(t)));
        }
        if let Some(r) = &self.relate {
            out.push(("relate", self.resolve(&r.policies)));
            out.extend(r.gold.iter().map(|g| ("relate", self.resolve(g))));
            out.extend(r.extra_graph.iter().map(|g| ("graph", self.resolve(g))));
        }
        out
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        content_hash(self)
    }
}
