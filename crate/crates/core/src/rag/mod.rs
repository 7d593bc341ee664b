//! Graph-grounded question answering: query generation, triple retrieval,
//! fact verbalization and prompt assembly around a pluggable LLM client.

mod llm;
mod prompt;

use serde::{Deserialize, Serialize};

pub use llm::{HttpLlm, LlmClient, MockLlm, ScriptedLlm};
pub use prompt::{fill, PromptTemplates, ANSWER_TEMPLATE_V1, QUERY_TEMPLATE_V1};

use crate::kg::{execute_query, parse_query, retrieve_triples, verbalize, Graph, TemplateTable, Triple};

/// Answer returned when no fact supports the question.
pub const INSUFFICIENT: &str = "insufficient information in knowledge graph";

/// Prefix of the keyword-retrieval directive used when no structured query
/// could be produced.
pub const RETRIEVE_PREFIX: &str = "RETRIEVE ";

pub const QUERY_ATTEMPTS: usize = 2;

#[derive(Debug, thiserror::Error)]
pub enum RagError {
    #[error("question is empty")]
    EmptyQuestion,
    #[error("llm request failed: {0}")]
    Llm(String),
    #[error("prompt template: {0}")]
    Template(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AskConfig {
    pub k: usize,
    pub max_tokens: usize,
}

impl Default for AskConfig {
    fn default() -> Self {
        AskConfig { k: 8, max_tokens: 512 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QaTrace {
    pub question: String,
    pub generated_query: String,
    pub triples: Vec<Triple>,
    pub facts_text: String,
    pub prompt: String,
    pub answer: String,
    pub llm_calls: usize,
}

/// Failure with whatever trace was assembled before it.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct QaFailure {
    pub error: RagError,
    pub trace: Box<QaTrace>,
}

fn schema(g: &Graph) -> (String, String) {
    let mut labels: Vec<&str> = g.nodes().map(|n| n.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut rels: Vec<&str> = g.edges().map(|(k, _)| k.rel.as_str()).collect();
    rels.sort_unstable();
    rels.dedup();
    (labels.join(", "), rels.join(", "))
}

fn clean_line(line: &str) -> &str {
    line.trim().trim_matches('`').trim()
}

/// Asks the client for a pattern query, keeping the first parseable line.
/// Falls back to `RETRIEVE <question>` for clients that do not write
/// queries or after [`QUERY_ATTEMPTS`] unusable replies. Returns the query
/// and the number of LLM calls made.
pub fn generate_query(
    question: &str,
    graph: &Graph,
    llm: &dyn LlmClient,
    templates: &PromptTemplates,
    max_tokens: usize,
) -> Result<(String, usize), RagError> {
    let question = question.trim();
    if question.is_empty() {
        return Err(RagError::EmptyQuestion);
    }
    let fallback = format!("{RETRIEVE_PREFIX}{question}");
    if !llm.generates_queries() {
        return Ok((fallback, 0));
    }
    let (labels, rels) = schema(graph);
    let prompt = templates.query_prompt(question, &labels, &rels);
    for attempt in 1..=QUERY_ATTEMPTS {
        let reply = llm.complete(&prompt, max_tokens)?;
        if let Some(line) = reply.lines().map(clean_line).find(|l| parse_query(l).is_ok()) {
            return Ok((line.to_string(), attempt));
        }
        log::debug!("query attempt {attempt} unusable: {reply:?}");
    }
    Ok((fallback, QUERY_ATTEMPTS))
}

/// Triples for a generated query or retrieval directive, at most `k`.
pub fn gather_triples(graph: &Graph, query: &str, k: usize) -> Vec<Triple> {
    if let Some(q) = query.strip_prefix(RETRIEVE_PREFIX) {
        return retrieve_triples(graph, q, k).triples;
    }
    match parse_query(query) {
        Ok(ast) => {
            let mut t = execute_query(graph, &ast);
            t.truncate(k);
            t
        }
        Err(_) => retrieve_triples(graph, query, k).triples,
    }
}

/// Runs the whole question-answering pipeline. The LLM is not called for
/// the answer when no triple was found.
pub fn answer(
    question: &str,
    graph: &Graph,
    llm: &dyn LlmClient,
    templates: &PromptTemplates,
    relations: &TemplateTable,
    cfg: &AskConfig,
) -> Result<QaTrace, QaFailure> {
    let mut trace = QaTrace { question: question.to_string(), ..Default::default() };
    let fail = |error: RagError, trace: &QaTrace| QaFailure { error, trace: Box::new(trace.clone()) };
    let (query, calls) = generate_query(question, graph, llm, templates, cfg.max_tokens).map_err(|e| fail(e, &trace))?;
    trace.generated_query = query;
    trace.llm_calls = calls;
    trace.triples = gather_triples(graph, &trace.generated_query, cfg.k);
    trace.facts_text = verbalize(&trace.triples, relations);
    trace.prompt = templates.answer_prompt(&trace.facts_text, question);
    if trace.triples.is_empty() {
        trace.answer = INSUFFICIENT.to_string();
        return Ok(trace);
    }
    trace.llm_calls += 1;
    trace.answer = llm.complete(&trace.prompt, cfg.max_tokens).map_err(|e| fail(e, &trace))?;
    Ok(trace)
}
