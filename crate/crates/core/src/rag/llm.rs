use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::RagError;
use crate::http::JsonClient;

pub trait LlmClient: Send + Sync {
    fn complete(&self, prompt: &str, max_tokens: usize) -> Result<String, RagError>;

    /// Whether the client should be asked to write structured queries.
    fn generates_queries(&self) -> bool {
        true
    }
}

/// Deterministic offline client that answers by restating the facts section.
#[derive(Debug, Default)]
pub struct MockLlm {
    calls: AtomicUsize,
}

impl MockLlm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for MockLlm {
    fn complete(&self, prompt: &str, _max_tokens: usize) -> Result<String, RagError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let facts = prompt
            .split_once("Facts:\n")
            .map(|(_, rest)| rest.split("\n\nQuestion:").next().unwrap_or(rest))
            .unwrap_or(prompt);
        Ok(format!("According to the knowledge graph: {}", facts.trim()))
    }

    fn generates_queries(&self) -> bool {
        false
    }
}

/// Replays recorded completions in order.
#[derive(Debug, Default)]
pub struct ScriptedLlm {
    responses: Mutex<VecDeque<String>>,
    calls: AtomicUsize,
}

impl ScriptedLlm {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(responses: I) -> Self {
        ScriptedLlm { responses: Mutex::new(responses.into_iter().map(Into::into).collect()), calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for ScriptedLlm {
    fn complete(&self, _prompt: &str, _max_tokens: usize) -> Result<String, RagError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.responses
            .lock()
            .expect("script lock")
            .pop_front()
            .ok_or_else(|| RagError::Llm("scripted responses exhausted".into()))
    }
}

#[derive(Serialize)]
struct CompleteRequest<'a> {
    prompt: &'a str,
    max_tokens: usize,
}

#[derive(Deserialize)]
struct CompleteResponse {
    text: String,
}

/// Client for a remote `/complete` endpoint.
#[derive(Debug, Clone)]
pub struct HttpLlm {
    client: JsonClient,
}

impl HttpLlm {
    pub fn new(endpoint: &str) -> Self {
        HttpLlm { client: JsonClient::new(endpoint, Duration::from_secs(120), 2) }
    }

    pub fn with_client(client: JsonClient) -> Self {
        HttpLlm { client }
    }
}

impl LlmClient for HttpLlm {
    fn complete(&self, prompt: &str, max_tokens: usize) -> Result<String, RagError> {
        let resp: CompleteResponse = self
            .client
            .post("/complete", &CompleteRequest { prompt, max_tokens })
            .map_err(|f| RagError::Llm(format!("{} (after {} attempts)", f.message, f.attempts)))?;
        Ok(resp.text)
    }
}
