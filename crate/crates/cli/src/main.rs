mod ask;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use forge_core::pipeline::PipelineError;

#[derive(Parser)]
#[command(name = "forge", version, about = "Intent discovery, relation discovery and knowledge-graph QA")]
pub struct Cli {
    /// Seed for every randomized stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Pipeline config (TOML or JSON). Stage commands take their defaults from it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split, segment and anonymize raw documents.
    Ingest(stages::IngestArgs),
    /// Embed utterances.
    Embed(stages::EmbedArgs),
    /// Reduce embeddings with UMAP.
    Reduce(stages::ReduceArgs),
    /// Cluster reduced points with HDBSCAN.
    Cluster(stages::ClusterArgs),
    /// Label clusters and deduplicate intents.
    Label(stages::LabelArgs),
    /// Link intents to policies.
    Relate(stages::RelateArgs),
    /// Build, query or search a graph snapshot.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Answer questions over a graph snapshot.
    Ask(ask::AskArgs),
    /// Run every stage from a config file.
    Discover(DiscoverArgs),
    /// Run the design-selection grid.
    Grid(GridArgs),
}

#[derive(Subcommand)]
enum GraphCommand {
    Build(stages::GraphBuildArgs),
    Query(stages::GraphQueryArgs),
    Retrieve(stages::GraphRetrieveArgs),
}

#[derive(Args)]
struct DiscoverArgs {
    /// Output directory for artifacts and the run report.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    out: PathBuf,
    /// Embedding provider for the 3.x cells: fallback[:DIM], file:PATH or http:URL.
    #[arg(long)]
    alternate: Option<String>,
    /// Also write the rows as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Bad invocation or configuration; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(p) = err.downcast_ref::<PipelineError>() {
        return p.exit_code() as u8;
    }
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    3
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon_pool(jobs)?;
    }
    let ctx = stages::Context::new(cli.seed, cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => stages::ingest(&ctx, a),
        Command::Embed(a) => stages::embed(&ctx, a),
        Command::Reduce(a) => stages::reduce(&ctx, a),
        Command::Cluster(a) => stages::cluster(&ctx, a),
        Command::Label(a) => stages::label(&ctx, a),
        Command::Relate(a) => stages::relate(&ctx, a),
        Command::Graph { command } => match command {
            GraphCommand::Build(a) => stages::graph_build(&ctx, a),
            GraphCommand::Query(a) => stages::graph_query(a),
            GraphCommand::Retrieve(a) => stages::graph_retrieve(a),
        },
        Command::Ask(a) => ask::run(a),
        Command::Discover(a) => stages::discover(&ctx, &a.out),
        Command::Grid(a) => stages::grid(&ctx, &a.out, a.alternate.as_deref(), a.json.as_deref(), cli.jobs),
    }
}

fn rayon_pool(jobs: usize) -> anyhow::Result<()> {
    if jobs == 0 {
        return Err(usage("--jobs must be positive"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| usage(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
