use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbedError, EmbeddingProvider, FallbackEmbedder};
use crate::http::JsonClient;
use crate::jsonl;

/// Maximum number of texts per gateway request.
pub const GATEWAY_BATCH: usize = 64;

/// Serializable provider selection, as written in pipeline configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProviderConfig {
    Fallback { dim: usize, seed: u64 },
    File { path: PathBuf },
    Gateway { endpoint: String, dim: usize },
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig::Fallback { dim: 256, seed: 0 }
    }
}

impl ProviderConfig {
    pub fn build(&self) -> Result<Box<dyn EmbeddingProvider>, EmbedError> {
        Ok(match self {
            ProviderConfig::Fallback { dim, seed } => Box::new(FallbackEmbedder::new(*dim, *seed)),
            ProviderConfig::File { path } => Box::new(FileEmbedder::load(path)?),
            ProviderConfig::Gateway { endpoint, dim } => Box::new(GatewayEmbedder::new(endpoint, *dim)),
        })
    }
}

#[derive(Debug, Deserialize)]
struct FileRecord {
    text: String,
    vector: Vec<f64>,
}

/// Precomputed vectors keyed by exact text.
#[derive(Debug, Clone)]
pub struct FileEmbedder {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl FileEmbedder {
    pub fn load(path: &Path) -> Result<Self, EmbedError> {
        let records: Vec<FileRecord> = jsonl::read(path).map_err(|e| EmbedError::Provider {
            message: e.to_string(),
            retries: 0,
        })?;
        Self::from_pairs(records.into_iter().map(|r| (r.text, r.vector)))
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, Vec<f64>)>>(pairs: I) -> Result<Self, EmbedError> {
        let mut dim = None;
        let mut vectors = HashMap::new();
        for (text, vector) in pairs {
            match dim {
                None => dim = Some(vector.len()),
                Some(d) if d != vector.len() => {
                    return Err(EmbedError::DimensionMismatch { expected: d, actual: vector.len() })
                }
                _ => {}
            }
            vectors.insert(text, vector);
        }
        let dim = dim.ok_or_else(|| EmbedError::Provider { message: "empty vector file".into(), retries: 0 })?;
        Ok(FileEmbedder { dim, vectors })
    }
}

impl EmbeddingProvider for FileEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        texts
            .iter()
            .map(|t| self.vectors.get(t).cloned().ok_or_else(|| EmbedError::MissingKey(t.clone())))
            .collect()
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

/// Client for a remote `/embed` endpoint.
#[derive(Debug, Clone)]
pub struct GatewayEmbedder {
    client: JsonClient,
    dim: usize,
}

impl GatewayEmbedder {
    pub fn new(endpoint: &str, dim: usize) -> Self {
        GatewayEmbedder { client: JsonClient::new(endpoint, Duration::from_secs(60), 3), dim }
    }

    pub fn with_client(client: JsonClient, dim: usize) -> Self {
        GatewayEmbedder { client, dim }
    }
}

impl EmbeddingProvider for GatewayEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(GATEWAY_BATCH) {
            let resp: EmbedResponse = self
                .client
                .post("/embed", &EmbedRequest { texts: chunk })
                .map_err(|f| EmbedError::Provider { message: f.message, retries: f.attempts.saturating_sub(1) })?;
            if resp.dim != self.dim {
                return Err(EmbedError::DimensionMismatch { expected: self.dim, actual: resp.dim });
            }
            if resp.vectors.len() != chunk.len() {
                return Err(EmbedError::Provider {
                    message: format!("gateway returned {} vectors for {} texts", resp.vectors.len(), chunk.len()),
                    retries: 0,
                });
            }
            out.extend(resp.vectors);
        }
        Ok(out)
    }
}
