use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use clap::Args;

use forge_core::kg::{load_snapshot, TemplateTable};
use forge_core::pipeline::PipelineError;
use forge_core::rag::{answer, AskConfig, HttpLlm, LlmClient, MockLlm, PromptTemplates, QaTrace};

use crate::usage;

#[derive(Args)]
pub struct AskArgs {
    #[arg(long)]
    graph: PathBuf,
    /// `mock` or `http:URL` of a /complete endpoint.
    #[arg(long, default_value = "mock")]
    llm: String,
    /// Directory holding answer_prompt.v1.txt and query_prompt.v1.txt.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Print the full trace as JSON instead of just the answer.
    #[arg(long)]
    trace: bool,
    #[arg(short, default_value_t = AskConfig::default().k)]
    k: usize,
    #[arg(long, default_value_t = AskConfig::default().max_tokens)]
    max_tokens: usize,
    /// Question to answer; reads questions from stdin when omitted.
    question: Option<String>,
}

fn make_llm(spec: &str) -> anyhow::Result<Box<dyn LlmClient>> {
    if spec == "mock" {
        return Ok(Box::new(MockLlm::new()));
    }
    match spec.strip_prefix("http:") {
        Some(rest) if rest.starts_with("//") => Ok(Box::new(HttpLlm::new(spec))),
        Some(rest) => Ok(Box::new(HttpLlm::new(rest))),
        None if spec.starts_with("https:") => Ok(Box::new(HttpLlm::new(spec))),
        None => Err(usage(format!("unknown llm {spec:?}; expected mock or http:URL"))),
    }
}

fn emit(trace: &QaTrace, as_json: bool) -> anyhow::Result<()> {
    if as_json {
        println!("{}", serde_json::to_string(trace)?);
    } else {
        println!("{}", trace.answer);
    }
    Ok(())
}

pub fn run(a: AskArgs) -> anyhow::Result<()> {
    if !a.graph.is_file() {
        return Err(PipelineError::Stage { stage: "graph", message: format!("missing input file {}", a.graph.display()) }.into());
    }
    let graph = load_snapshot(&a.graph)
        .map_err(|e| PipelineError::Stage { stage: "graph", message: e.to_string() })?;
    let templates = match &a.templates {
        Some(dir) => PromptTemplates::load(dir).map_err(|e| usage(e.to_string()))?,
        None => PromptTemplates::default(),
    };
    let llm = make_llm(&a.llm)?;
    let relations = TemplateTable::default();
    let cfg = AskConfig { k: a.k, max_tokens: a.max_tokens };
    let ask = |q: &str| -> anyhow::Result<()> {
        match answer(q, &graph, llm.as_ref(), &templates, &relations, &cfg) {
            Ok(t) => emit(&t, a.trace),
            Err(f) => {
                if a.trace {
                    eprintln!("{}", serde_json::to_string(&f.trace)?);
                }
                Err(PipelineError::Stage { stage: "ask", message: f.error.to_string() }.into())
            }
        }
    };
    if let Some(q) = &a.question {
        return ask(q);
    }
    let stdin = io::stdin();
    let mut line = String::new();
    loop {
        eprint!("> ");
        io::stderr().flush()?;
        line.clear();
        if stdin.lock().read_line(&mut line)? == 0 {
            break;
        }
        let q = line.trim();
        if q.is_empty() {
            continue;
        }
        if matches!(q, "exit" | "quit") {
            break;
        }
        if let Err(e) = ask(q) {
            eprintln!("error: {e:#}");
        }
    }
    Ok(())
}
