use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::Args;
use serde::Serialize;

use forge_core::cluster::ClusterParams;
use forge_core::corpus::{CorpusConfig, NoiseFilter};
use forge_core::embed::ProviderConfig;
use forge_core::kg::{build_graph, execute_query, load_snapshot, parse_query, retrieve_triples, ExtraGraph};
use forge_core::label::{label_clusters, IntentEntity, LabelConfig, NgramRange};
use forge_core::pipeline::{
    assignments_for, check_inputs, content_hash, ensure_same_run, format_grid, make_tagger, preset_cells, read_artifact,
    run_cluster, run_discover, run_embed, run_experiment_grid, run_ingest, run_reduce, snapshot_with_meta,
    write_artifact, ClusterRecord, EmbeddingRecord, Meta, PipelineConfig, PipelineError, PointRecord,
};
use forge_core::reduce::ReduceParams;
use forge_core::relate::{discover_relations, load_gold, load_policies, relation_metrics, Relation, RelateParams};
use forge_core::Utterance;

use crate::usage;

const DEFAULT_SEED: u64 = 42;

pub struct Context {
    seed: Option<u64>,
    config: Option<PipelineConfig>,
}

impl Context {
    pub fn new(seed: Option<u64>, config: Option<&Path>) -> anyhow::Result<Self> {
        let config = match config {
            Some(p) => {
                let mut cfg = PipelineConfig::load(p)?;
                if let Some(s) = seed {
                    cfg.seed = s;
                }
                Some(cfg)
            }
            None => None,
        };
        Ok(Context { seed, config })
    }

    fn seed(&self, upstream: Option<&Meta>) -> u64 {
        self.seed
            .or(self.config.as_ref().map(|c| c.seed))
            .or(upstream.map(|m| m.seed))
            .unwrap_or(DEFAULT_SEED)
    }

    fn config(&self) -> anyhow::Result<&PipelineConfig> {
        self.config.as_ref().ok_or_else(|| usage("this command needs --config"))
    }
}

fn stage_err<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> PipelineError {
    move |e| PipelineError::Stage { stage, message: e.to_string() }
}

/// Header for a stage output: the inputs' run when they carry one,
/// otherwise a fresh hash of the stage's own settings.
fn output_meta<T: Serialize>(
    stage: &str,
    inputs: &[(&Path, &Option<Meta>)],
    settings: &T,
    seed: u64,
) -> Result<Meta, PipelineError> {
    Ok(match ensure_same_run(inputs)? {
        Some(m) => Meta { seed, ..m.for_stage(stage) },
        None => Meta::new(stage, &content_hash(settings), seed),
    })
}

fn require_file(stage: &'static str, path: &Path) -> Result<(), PipelineError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(PipelineError::Stage { stage, message: format!("missing input file {}", path.display()) })
    }
}

/// `fallback[:DIM]`, `file:PATH` or `http:URL`.
pub fn parse_provider(spec: &str, dim: usize, seed: u64) -> anyhow::Result<ProviderConfig> {
    if spec == "fallback" {
        return Ok(ProviderConfig::Fallback { dim, seed });
    }
    if let Some(d) = spec.strip_prefix("fallback:") {
        let dim = d.parse().map_err(|_| usage(format!("bad fallback dimension {d:?}")))?;
        return Ok(ProviderConfig::Fallback { dim, seed });
    }
    if let Some(p) = spec.strip_prefix("file:") {
        return Ok(ProviderConfig::File { path: PathBuf::from(p) });
    }
    if spec.starts_with("http:") || spec.starts_with("https:") {
        let endpoint = spec.strip_prefix("http:").filter(|r| !r.starts_with("//")).unwrap_or(spec);
        return Ok(ProviderConfig::Gateway { endpoint: endpoint.to_string(), dim });
    }
    Err(usage(format!("unknown embedding provider {spec:?}; expected fallback[:DIM], file:PATH or http:URL")))
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[derive(Args)]
pub struct IngestArgs {
    /// Document JSONL files.
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    abbreviations: Option<PathBuf>,
    /// Gazetteer of person names for the name rule.
    #[arg(long)]
    names: Option<PathBuf>,
    /// Skip person-name censoring.
    #[arg(long)]
    no_ner: bool,
    #[arg(long, default_value_t = NoiseFilter::default().min_tokens)]
    min_tokens: usize,
    #[arg(long, default_value_t = NoiseFilter::default().min_alpha_ratio)]
    min_alpha_ratio: f64,
    #[arg(long)]
    out: PathBuf,
}

pub fn ingest(ctx: &Context, a: IngestArgs) -> anyhow::Result<()> {
    let ner = !a.no_ner && a.names.is_some();
    if !a.no_ner && a.names.is_none() {
        log::warn!("no --names gazetteer given; person names will not be censored");
    }
    let cfg = CorpusConfig {
        inputs: a.inputs,
        lexicon: a.lexicon,
        abbreviations: a.abbreviations,
        names: a.names,
        noise: NoiseFilter { min_tokens: a.min_tokens, min_alpha_ratio: a.min_alpha_ratio },
        ner,
    };
    for p in cfg.inputs.iter().chain([&cfg.lexicon, &cfg.abbreviations, &cfg.names].into_iter().flatten()) {
        require_file("ingest", p)?;
    }
    let utterances = run_ingest(&cfg)?;
    let seed = ctx.seed(None);
    let meta = match &ctx.config {
        Some(c) => Meta::new("ingest", &c.hash(), seed),
        None => Meta::new("ingest", &content_hash(&cfg), seed),
    };
    write_artifact(&a.out, &meta, &utterances)?;
    eprintln!("{} utterances written to {}", utterances.len(), a.out.display());
    Ok(())
}

#[derive(Args)]
pub struct EmbedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// fallback[:DIM], file:PATH or http:URL; defaults to the config's provider.
    #[arg(long)]
    provider: Option<String>,
    #[arg(long, default_value_t = 256)]
    dim: usize,
    #[arg(long)]
    out: PathBuf,
}

pub fn embed(ctx: &Context, a: EmbedArgs) -> anyhow::Result<()> {
    require_file("embed", &a.input)?;
    let (meta_in, utterances): (_, Vec<Utterance>) = read_artifact(&a.input)?;
    let provider = match (&a.provider, &ctx.config) {
        (Some(spec), _) => parse_provider(spec, a.dim, 0)?,
        (None, Some(c)) => c.embedding_resolved(),
        (None, None) => ProviderConfig::default(),
    };
    if let ProviderConfig::File { path } = &provider {
        require_file("embed", path)?;
    }
    let built = provider.build().map_err(stage_err("embed"))?;
    let records = run_embed(built.as_ref(), &utterances)?;
    let meta = output_meta("embed", &[(&a.input, &meta_in)], &provider, ctx.seed(meta_in.as_ref()))?;
    write_artifact(&a.out, &meta, &records)?;
    eprintln!("{} vectors written to {}", records.len(), a.out.display());
    Ok(())
}

#[derive(Args)]
pub struct ReduceArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    n_neighbors: Option<usize>,
    #[arg(long)]
    n_components: Option<usize>,
    #[arg(long)]
    min_dist: Option<f64>,
    #[arg(long)]
    n_epochs: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

pub fn reduce(ctx: &Context, a: ReduceArgs) -> anyhow::Result<()> {
    require_file("reduce", &a.input)?;
    let (meta_in, records): (_, Vec<EmbeddingRecord>) = read_artifact(&a.input)?;
    let base = ctx.config.as_ref().map(|c| c.reduce).unwrap_or_default();
    let params = ReduceParams {
        n_neighbors: a.n_neighbors.unwrap_or(base.n_neighbors),
        n_components: a.n_components.unwrap_or(base.n_components),
        min_dist: a.min_dist.unwrap_or(base.min_dist),
        n_epochs: a.n_epochs.unwrap_or(base.n_epochs),
        seed: ctx.seed(meta_in.as_ref()),
    };
    params.validate().map_err(|e| usage(e.to_string()))?;
    let points = run_reduce(&records, &params)?;
    let meta = output_meta("reduce", &[(&a.input, &meta_in)], &params, params.seed)?;
    write_artifact(&a.out, &meta, &points)?;
    eprintln!("{} points written to {}", points.len(), a.out.display());
    Ok(())
}

#[derive(Args)]
pub struct ClusterArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    min_cluster_size: Option<usize>,
    /// Defaults to the minimum cluster size.
    #[arg(long)]
    min_samples: Option<usize>,
    #[arg(long)]
    allow_single_cluster: bool,
    #[arg(long)]
    out: PathBuf,
}

pub fn cluster(ctx: &Context, a: ClusterArgs) -> anyhow::Result<()> {
    require_file("cluster", &a.input)?;
    let (meta_in, points): (_, Vec<PointRecord>) = read_artifact(&a.input)?;
    let base = ctx.config.as_ref().map(|c| c.cluster).unwrap_or_default();
    let params = match (a.min_cluster_size, a.min_samples) {
        (None, None) => ClusterParams { allow_single_cluster: base.allow_single_cluster || a.allow_single_cluster, ..base },
        (mcs, ms) => {
            let mcs = mcs.unwrap_or(base.min_cluster_size);
            ClusterParams { min_cluster_size: mcs, min_samples: ms.unwrap_or(mcs), allow_single_cluster: a.allow_single_cluster }
        }
    };
    params.validate().map_err(|e| usage(e.to_string()))?;
    let clusters = run_cluster(&points, &params)?;
    let meta = output_meta("cluster", &[(&a.input, &meta_in)], &params, ctx.seed(meta_in.as_ref()))?;
    write_artifact(&a.out, &meta, &clusters)?;
    let n = clusters.iter().filter(|c| c.cluster >= 0).map(|c| c.cluster).max().map_or(0, |m| m + 1);
    eprintln!("{n} clusters written to {}", a.out.display());
    Ok(())
}

#[derive(Args)]
pub struct LabelArgs {
    /// Utterances artifact from `forge ingest`.
    #[arg(long)]
    utterances: PathBuf,
    #[arg(long)]
    clusters: PathBuf,
    /// Pre-tagged TSV corpus.
    #[arg(long)]
    tags: Option<PathBuf>,
    /// Base URL of a /tag gateway, used without --tags.
    #[arg(long)]
    tagger: Option<String>,
    /// cTF-IDF n-gram range as LO:HI.
    #[arg(long)]
    ngram: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    top_keywords: Option<usize>,
    /// Per-cluster keywords, representatives and labels.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Deduplicated intents.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct LabelSettings<'a> {
    cfg: &'a LabelConfig,
    tags: Option<&'a Path>,
    tagger: Option<&'a str>,
}

pub fn label(ctx: &Context, a: LabelArgs) -> anyhow::Result<()> {
    let stage = ctx.config.as_ref().map(|c| c.label.clone());
    let tags = a.tags.clone().or_else(|| {
        let c = ctx.config.as_ref()?;
        c.label.tags.as_ref().map(|t| c.resolve(t))
    });
    let endpoint = a.tagger.clone().or_else(|| stage.as_ref().and_then(|s| s.tagger_endpoint.clone()));
    if tags.is_none() && endpoint.is_none() {
        return Err(usage("label needs --tags or --tagger"));
    }
    let base = stage.map(|s| s.label_config()).unwrap_or_default();
    let ngram = match &a.ngram {
        Some(s) => NgramRange::parse(s).map_err(|e| usage(e.to_string()))?,
        None => base.ngram,
    };
    let cfg = LabelConfig {
        ngram,
        reps: a.reps.unwrap_or(base.reps),
        top_keywords: a.top_keywords.unwrap_or(base.top_keywords),
        elements: base.elements,
    };
    if cfg.reps == 0 || cfg.top_keywords == 0 {
        return Err(usage("--reps and --top-keywords must be positive"));
    }
    for p in [&a.utterances, &a.clusters].into_iter().chain(tags.as_ref()) {
        require_file("label", p)?;
    }
    let (mu, utterances): (_, Vec<Utterance>) = read_artifact(&a.utterances)?;
    let (mc, clusters): (_, Vec<ClusterRecord>) = read_artifact(&a.clusters)?;
    let settings = LabelSettings { cfg: &cfg, tags: tags.as_deref(), tagger: endpoint.as_deref() };
    let meta = output_meta("label", &[(&a.utterances, &mu), (&a.clusters, &mc)], &settings, ctx.seed(mu.as_ref()))?;
    let tagger = make_tagger(tags.as_deref(), endpoint.as_deref())?;
    let assign = assignments_for(&utterances, &clusters)?;
    let out = label_clusters(&utterances, &assign, tagger.as_ref(), &cfg).map_err(stage_err("label"))?;
    write_artifact(&a.out, &meta, &out.intents)?;
    if let Some(p) = &a.summary {
        write_artifact(p, &meta, &out.clusters)?;
    }
    for i in &out.intents {
        println!("{}\t{}\t{}", i.id, i.support, i.label);
    }
    Ok(())
}

#[derive(Args)]
pub struct RelateArgs {
    #[arg(long)]
    intents: PathBuf,
    #[arg(long)]
    policies: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    top_k: Option<usize>,
    /// Weight of the embedding score in the rerank score.
    #[arg(long)]
    alpha: Option<f64>,
    /// fallback[:DIM], file:PATH or http:URL; defaults to the config's provider.
    #[arg(long)]
    provider: Option<String>,
    #[arg(long, default_value_t = 256)]
    dim: usize,
    /// Gold intent/policy pairs for the overlooked count.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Write the relation report JSON here as well as to stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn relate(ctx: &Context, a: RelateArgs) -> anyhow::Result<()> {
    let stage = ctx.config.as_ref().and_then(|c| c.relate.clone());
    let resolve = |p: &PathBuf| ctx.config.as_ref().map_or(p.clone(), |c| c.resolve(p));
    let policies_path = a
        .policies
        .clone()
        .or_else(|| stage.as_ref().map(|s| resolve(&s.policies)))
        .ok_or_else(|| usage("relate needs --policies"))?;
    let gold_path = a.gold.clone().or_else(|| stage.as_ref().and_then(|s| s.gold.as_ref().map(resolve)));
    let base = stage.as_ref().map(|s| s.params()).unwrap_or_default();
    let params = RelateParams {
        threshold: a.threshold.unwrap_or(base.threshold),
        top_k: a.top_k.unwrap_or(base.top_k),
        alpha: a.alpha.unwrap_or(base.alpha),
    };
    params.validate().map_err(|e| usage(e.to_string()))?;
    let provider = match (&a.provider, &ctx.config) {
        (Some(spec), _) => parse_provider(spec, a.dim, 0)?,
        (None, Some(c)) => c.embedding_resolved(),
        (None, None) => ProviderConfig::default(),
    };
    for p in [&a.intents, &policies_path].into_iter().chain(gold_path.as_ref()) {
        require_file("relate", p)?;
    }
    let (mi, intents): (_, Vec<IntentEntity>) = read_artifact(&a.intents)?;
    let meta = output_meta("relate", &[(&a.intents, &mi)], &(&params, &provider), ctx.seed(mi.as_ref()))?;
    let policies = load_policies(&policies_path).map_err(stage_err("relate"))?;
    let built = provider.build().map_err(stage_err("relate"))?;
    let relations = if intents.is_empty() {
        Vec::new()
    } else {
        discover_relations(&intents, &policies, built.as_ref(), &params).map_err(stage_err("relate"))?
    };
    let gold = gold_path.as_deref().map(load_gold).transpose().map_err(stage_err("relate"))?;
    let report = relation_metrics(&relations, &intents, &policies, gold.as_deref()).map_err(stage_err("relate"))?;
    write_artifact(&a.out, &meta, &relations)?;
    if let Some(p) = &a.report {
        fs::write(p, serde_json::to_string_pretty(&report)? + "\n").with_context(|| p.display().to_string())?;
    }
    print_json(&report)
}

#[derive(Args)]
pub struct GraphBuildArgs {
    #[arg(long)]
    intents: PathBuf,
    #[arg(long)]
    policies: PathBuf,
    #[arg(long)]
    relations: PathBuf,
    /// Hand-made nodes and edges in snapshot format.
    #[arg(long)]
    extra: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

pub fn graph_build(ctx: &Context, a: GraphBuildArgs) -> anyhow::Result<()> {
    for p in [&a.intents, &a.policies, &a.relations].into_iter().chain(a.extra.as_ref()) {
        require_file("graph", p)?;
    }
    let (mi, intents): (_, Vec<IntentEntity>) = read_artifact(&a.intents)?;
    let (mr, relations): (_, Vec<Relation>) = read_artifact(&a.relations)?;
    let meta = output_meta(
        "graph",
        &[(&a.intents, &mi), (&a.relations, &mr)],
        &(&a.policies, &a.extra),
        ctx.seed(mi.as_ref()),
    )?;
    let policies = load_policies(&a.policies).map_err(stage_err("graph"))?;
    let extra = a.extra.as_deref().map(ExtraGraph::load).transpose().map_err(stage_err("graph"))?;
    let built = build_graph(&intents, &policies, &relations, extra.as_ref()).map_err(stage_err("graph"))?;
    fs::write(&a.out, snapshot_with_meta(&meta, &built.graph)).with_context(|| a.out.display().to_string())?;
    eprintln!(
        "{} nodes, {} edges written to {} ({} duplicates ignored)",
        built.graph.node_count(),
        built.graph.edge_count(),
        a.out.display(),
        built.warnings.len()
    );
    Ok(())
}

#[derive(Args)]
pub struct GraphQueryArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Pattern query, e.g. MATCH (i:Intent)-[:RELATED_POLICY]->(p:Policy) RETURN i, p
    #[arg(long)]
    q: String,
}

pub fn graph_query(a: GraphQueryArgs) -> anyhow::Result<()> {
    let query = parse_query(&a.q).map_err(|e| usage(format!("{e}\n  {}\n  {}^", a.q, " ".repeat(e.offset))))?;
    require_file("graph", &a.graph)?;
    let g = load_snapshot(&a.graph).map_err(stage_err("graph"))?;
    for t in execute_query(&g, &query) {
        println!("{}", serde_json::to_string(&t)?);
    }
    Ok(())
}

#[derive(Args)]
pub struct GraphRetrieveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    question: String,
    #[arg(short, default_value_t = 8)]
    k: usize,
}

pub fn graph_retrieve(a: GraphRetrieveArgs) -> anyhow::Result<()> {
    require_file("graph", &a.graph)?;
    let g = load_snapshot(&a.graph).map_err(stage_err("graph"))?;
    let r = retrieve_triples(&g, &a.question, a.k);
    if r.no_anchor {
        eprintln!("no node matches the question");
    }
    for t in &r.triples {
        println!("{}", serde_json::to_string(t)?);
    }
    Ok(())
}

pub fn discover(ctx: &Context, out: &Path) -> anyhow::Result<()> {
    let cfg = ctx.config()?;
    let output = run_discover(cfg, out)?;
    let r = &output.report;
    println!(
        "{} utterances, {} clusters ({} noise points), {} intents",
        r.n_utterances, r.n_clusters, r.n_noise, r.n_intents
    );
    for i in &output.labels.intents {
        println!("{}\t{}\t{}", i.id, i.support, i.label);
    }
    if let Some(rel) = &r.relations {
        println!("{}", serde_json::to_string(rel)?);
    }
    Ok(())
}

pub fn grid(ctx: &Context, out: &Path, alternate: Option<&str>, json: Option<&Path>, jobs: Option<usize>) -> anyhow::Result<()> {
    let cfg = ctx.config()?;
    check_inputs(cfg)?;
    let alternate = alternate.map(|s| parse_provider(s, 256, 0)).transpose()?;
    let cells = preset_cells(alternate);
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let rows = run_experiment_grid(cfg, &cells, out, jobs);
    print!("{}", format_grid(&rows));
    if let Some(p) = json {
        fs::write(p, serde_json::to_string_pretty(&rows)? + "\n").with_context(|| p.display().to_string())?;
    }
    Ok(())
}
