use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::artifact::{snapshot_with_meta, write_artifact, ClusterRecord, EmbeddingRecord, Meta, PointRecord};
use super::config::PipelineConfig;
use super::PipelineError;
use crate::cluster::{hdbscan, ClusterParams};
use crate::corpus::{ingest, CorpusConfig};
use crate::embed::{embed_batch, EmbeddingProvider};
use crate::kg::{build_graph, ExtraGraph, Graph};
use crate::label::{label_clusters, GatewayTagger, LabelOutput, TaggedCorpus, Tagger};
use crate::reduce::{umap_keyed, ReduceParams};
use crate::relate::{discover_relations, load_gold, load_policies, relation_metrics, Relation, RelationReport};
use crate::Utterance;

pub const REPORT_SCHEMA: &str = "forge.run_report/1";

fn stage<E: std::fmt::Display>(name: &'static str) -> impl Fn(E) -> PipelineError {
    move |e| PipelineError::Stage { stage: name, message: e.to_string() }
}

pub fn run_ingest(cfg: &CorpusConfig) -> Result<Vec<Utterance>, PipelineError> {
    ingest(cfg).map_err(stage("ingest"))
}

pub fn run_embed(provider: &dyn EmbeddingProvider, utterances: &[Utterance]) -> Result<Vec<EmbeddingRecord>, PipelineError> {
    let texts: Vec<String> = utterances.iter().map(|u| u.text.clone()).collect();
    let vecs = embed_batch(provider, &texts).map_err(stage("embed"))?;
    Ok(utterances.iter().zip(vecs).map(|(u, v)| EmbeddingRecord { id: u.id.clone(), vector: v.into_inner() }).collect())
}

pub fn run_reduce(records: &[EmbeddingRecord], params: &ReduceParams) -> Result<Vec<PointRecord>, PipelineError> {
    let ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
    let vecs: Vec<&[f64]> = records.iter().map(|r| r.vector.as_slice()).collect();
    let pts = umap_keyed(&vecs, &ids, params).map_err(stage("reduce"))?;
    Ok(records.iter().zip(pts).map(|(r, p)| PointRecord { id: r.id.clone(), point: p }).collect())
}

pub fn run_cluster(points: &[PointRecord], params: &ClusterParams) -> Result<Vec<ClusterRecord>, PipelineError> {
    let pts: Vec<&[f64]> = points.iter().map(|p| p.point.as_slice()).collect();
    let out = hdbscan(&pts, params).map_err(stage("cluster"))?;
    Ok(points
        .iter()
        .zip(out.labels.iter().zip(&out.probabilities))
        .map(|(p, (&c, &prob))| ClusterRecord { id: p.id.clone(), cluster: c, prob })
        .collect())
}

/// Builds the configured tagger: a pre-tagged TSV file or a `/tag` gateway.
pub fn make_tagger(tags: Option<&Path>, endpoint: Option<&str>) -> Result<Box<dyn Tagger>, PipelineError> {
    match (tags, endpoint) {
        (Some(p), _) => Ok(Box::new(TaggedCorpus::load(p).map_err(stage("label"))?)),
        (None, Some(url)) => Ok(Box::new(GatewayTagger::new(url))),
        (None, None) => Err(PipelineError::Config("no tagger configured".into())),
    }
}

/// Joins cluster records to utterances by id.
pub fn assignments_for(utterances: &[Utterance], clusters: &[ClusterRecord]) -> Result<Vec<i64>, PipelineError> {
    let by_id: BTreeMap<&str, i64> = clusters.iter().map(|c| (c.id.as_str(), c.cluster)).collect();
    utterances
        .iter()
        .map(|u| {
            by_id.get(u.id.as_str()).copied().ok_or_else(|| PipelineError::Stage {
                stage: "label",
                message: format!("utterance {:?} has no cluster assignment", u.id),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphCounts {
    pub nodes: usize,
    pub edges: usize,
}

/// Summary of one discover run. Wall-clock timings live in a separate file
/// so that reruns produce identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub config_hash: String,
    pub seed: u64,
    pub n_utterances: usize,
    pub n_clusters: usize,
    pub n_noise: usize,
    pub n_intents: usize,
    pub n_unlabeled_clusters: usize,
    pub ctfidf_log_base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<RelationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphCounts>,
    pub artifacts: Vec<String>,
    pub timings_file: String,
    pub config: PipelineConfig,
}

pub struct RunOutput {
    pub report: RunReport,
    pub timings: BTreeMap<String, f64>,
    pub labels: LabelOutput,
    pub relations: Vec<Relation>,
    pub graph: Option<Graph>,
}

struct Clock {
    timings: BTreeMap<String, f64>,
}

impl Clock {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T, PipelineError>) -> Result<T, PipelineError> {
        let start = Instant::now();
        let out = f();
        self.timings.insert(name.to_string(), start.elapsed().as_secs_f64());
        log::info!("stage {name} finished in {:.3}s", self.timings[name]);
        out
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    fs::write(path, s).map_err(|e| PipelineError::Artifact(format!("{}: {e}", path.display())))
}

/// Checks that every referenced input exists, naming the stage that needs it.
pub fn check_inputs(cfg: &PipelineConfig) -> Result<(), PipelineError> {
    for (stage, path) in cfg.referenced_files() {
        if !path.is_file() {
            return Err(PipelineError::Stage { stage, message: format!("missing input file {}", path.display()) });
        }
    }
    Ok(())
}

/// ingest → embed → reduce → cluster → label, then relate and graph when
/// policies are configured. Every intermediate artifact goes to `out_dir`.
pub fn run_discover(cfg: &PipelineConfig, out_dir: &Path) -> Result<RunOutput, PipelineError> {
    cfg.validate()?;
    check_inputs(cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| PipelineError::Artifact(format!("{}: {e}", out_dir.display())))?;
    let hash = cfg.hash();
    let meta = Meta::new("ingest", &hash, cfg.seed);
    let mut clock = Clock { timings: BTreeMap::new() };
    let mut artifacts = Vec::new();
    let mut put = |name: &str| artifacts.push(name.to_string());

    let utterances = clock.time("ingest", || run_ingest(&cfg.corpus_resolved()))?;
    write_artifact(&out_dir.join("utterances.jsonl"), &meta, &utterances)?;
    put("utterances.jsonl");

    let provider = cfg.embedding_resolved().build().map_err(stage("embed"))?;
    let embeddings = clock.time("embed", || run_embed(provider.as_ref(), &utterances))?;
    write_artifact(&out_dir.join("embeddings.jsonl"), &meta.for_stage("embed"), &embeddings)?;
    put("embeddings.jsonl");

    let points = clock.time("reduce", || run_reduce(&embeddings, &cfg.reduce_params()))?;
    write_artifact(&out_dir.join("reduced.jsonl"), &meta.for_stage("reduce"), &points)?;
    put("reduced.jsonl");

    let clusters = clock.time("cluster", || run_cluster(&points, &cfg.cluster))?;
    write_artifact(&out_dir.join("clusters.jsonl"), &meta.for_stage("cluster"), &clusters)?;
    put("clusters.jsonl");

    let labels = clock.time("label", || {
        let tags = cfg.label.tags.as_ref().map(|t| cfg.resolve(t));
        let tagger = make_tagger(tags.as_deref(), cfg.label.tagger_endpoint.as_deref())?;
        let assign = assignments_for(&utterances, &clusters)?;
        label_clusters(&utterances, &assign, tagger.as_ref(), &cfg.label.label_config()).map_err(stage("label"))
    })?;
    write_artifact(&out_dir.join("cluster_labels.jsonl"), &meta.for_stage("label"), &labels.clusters)?;
    write_artifact(&out_dir.join("intents.jsonl"), &meta.for_stage("label"), &labels.intents)?;
    put("cluster_labels.jsonl");
    put("intents.jsonl");

    let mut relations = Vec::new();
    let mut relation_report = None;
    let mut graph = None;
    if let Some(rc) = &cfg.relate {
        let (rels, report) = clock.time("relate", || {
            let policies = load_policies(&cfg.resolve(&rc.policies)).map_err(stage("relate"))?;
            let rels = if labels.intents.is_empty() {
                Vec::new()
            } else {
                discover_relations(&labels.intents, &policies, provider.as_ref(), &rc.params()).map_err(stage("relate"))?
            };
            let gold = match &rc.gold {
                Some(g) => Some(load_gold(&cfg.resolve(g)).map_err(stage("relate"))?),
                None => None,
            };
            let report = relation_metrics(&rels, &labels.intents, &policies, gold.as_deref()).map_err(stage("relate"))?;
            Ok((rels, (report, policies)))
        })?;
        let (report, policies) = report;
        write_artifact(&out_dir.join("relations.jsonl"), &meta.for_stage("relate"), &rels)?;
        put("relations.jsonl");
        let g = clock.time("graph", || {
            let extra = match &rc.extra_graph {
                Some(p) => Some(ExtraGraph::load(&cfg.resolve(p)).map_err(stage("graph"))?),
                None => None,
            };
            let built = build_graph(&labels.intents, &policies, &rels, extra.as_ref()).map_err(stage("graph"))?;
            Ok(built.graph)
        })?;
        let snapshot = snapshot_with_meta(&meta.for_stage("graph"), &g);
        fs::write(out_dir.join("graph.jsonl"), snapshot).map_err(|e| PipelineError::Artifact(e.to_string()))?;
        put("graph.jsonl");
        relations = rels;
        relation_report = Some(report);
        graph = Some(g);
    }

    let n_noise = clusters.iter().filter(|c| c.cluster < 0).count();
    let report = RunReport {
        schema: REPORT_SCHEMA.to_string(),
        config_hash: hash,
        seed: cfg.seed,
        n_utterances: utterances.len(),
        n_clusters: labels.clusters.len(),
        n_noise,
        n_intents: labels.intents.len(),
        n_unlabeled_clusters: labels.clusters.iter().filter(|c| c.unlabeled).count(),
        ctfidf_log_base: "e".to_string(),
        relations: relation_report,
        graph: graph.as_ref().map(|g| GraphCounts { nodes: g.node_count(), edges: g.edge_count() }),
        artifacts,
        timings_file: "timings.json".to_string(),
        config: cfg.clone(),
    };
    write_json(&out_dir.join("report.json"), &report)?;
    write_json(&out_dir.join("timings.json"), &clock.timings)?;
    Ok(RunOutput { report, timings: clock.timings, labels, relations, graph })
}
