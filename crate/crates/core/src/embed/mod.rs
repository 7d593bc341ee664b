//! Sentence embeddings and the vector math used by every downstream stage.
//!
//! Providers return raw vectors; [`embed_batch`] enforces the shared contract
//! (order preserved, declared dimension, unit L2 norm).

mod fallback;
mod provider;
mod vector;

pub use fallback::{fallback_embed, fnv1a64, FallbackEmbedder};
pub use provider::{FileEmbedder, GatewayEmbedder, ProviderConfig, GATEWAY_BATCH};
pub use vector::{cosine, euclidean, squared_euclidean, Vector};

/// Tolerance on the unit-norm contract.
pub const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("provider error after {retries} retries: {message}")]
    Provider { message: String, retries: u32 },
    #[error("text has no vector in file provider (missing_key): {0:?}")]
    MissingKey(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("zero vector cannot be normalized (index {0})")]
    ZeroVector(usize),
    #[error("non-finite component in vector {0}")]
    NonFinite(usize),
    #[error("empty input batch")]
    EmptyBatch,
}

/// A source of raw sentence vectors. Implementations must be safe for
/// concurrent batch calls and return exactly [`dim`](Self::dim) entries per
/// text.
pub trait EmbeddingProvider: Send + Sync {
    fn dim(&self) -> usize;
    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError>;
}

/// Embeds `texts` and L2-normalizes any vector whose norm is off by more than
/// [`NORM_TOLERANCE`].
pub fn embed_batch<P: EmbeddingProvider + ?Sized>(
    provider: &P,
    texts: &[String],
) -> Result<Vec<Vector>, EmbedError> {
    if texts.is_empty() {
        return Err(EmbedError::EmptyBatch);
    }
    let raw = provider.embed_raw(texts)?;
    if raw.len() != texts.len() {
        return Err(EmbedError::Provider {
            message: format!("provider returned {} vectors for {} texts", raw.len(), texts.len()),
            retries: 0,
        });
    }
    let dim = provider.dim();
    raw.into_iter()
        .enumerate()
        .map(|(i, values)| {
            if values.len() != dim {
                return Err(EmbedError::DimensionMismatch { expected: dim, actual: values.len() });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(EmbedError::NonFinite(i));
            }
            let v = Vector::new(values);
            let norm = v.norm();
            if norm == 0.0 {
                return Err(EmbedError::ZeroVector(i));
            }
            if (norm - 1.0).abs() > NORM_TOLERANCE {
                Ok(v.normalized())
            } else {
                Ok(v)
            }
        })
        .collect()
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        (**self).embed_raw(texts)
    }
}
