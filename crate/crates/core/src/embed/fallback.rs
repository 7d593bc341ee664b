use super::{EmbedError, EmbeddingProvider, Vector};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const SIGN_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// 64-bit FNV-1a over `bytes`, with the seed folded in as eight leading bytes.
pub fn fnv1a64(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for b in seed.to_le_bytes().iter().chain(bytes) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Feature-hashed character 1-3-gram embedding of `text`.
///
/// Every whitespace token contributes all of its character n-grams of length
/// one to three. Each n-gram adds +1 or -1 to bucket `fnv(seed, gram) % dim`,
/// the sign coming from a second, differently salted hash. The result is
/// L2-normalized; text without any token yields the zero vector.
pub fn fallback_embed(text: &str, dim: usize, seed: u64) -> Vector {
    assert!(dim >= 8, "fallback embedding needs dim >= 8");
    let mut values = vec![0.0f64; dim];
    let mut buf = String::new();
    for token in text.split_whitespace() {
        let chars: Vec<char> = token.chars().collect();
        for n in 1..=3 {
            for window in chars.windows(n) {
                buf.clear();
                buf.extend(window);
                let bucket = (fnv1a64(seed, buf.as_bytes()) % dim as u64) as usize;
                let sign = if fnv1a64(seed ^ SIGN_SALT, buf.as_bytes()) >> 63 == 0 { 1.0 } else { -1.0 };
                values[bucket] += sign;
            }
        }
    }
    Vector::new(values).normalized()
}

/// Deterministic, model-free provider used in tests and offline runs.
#[derive(Debug, Clone)]
pub struct FallbackEmbedder {
    dim: usize,
    seed: u64,
}

impl FallbackEmbedder {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 8, "fallback embedding needs dim >= 8");
        FallbackEmbedder { dim, seed }
    }
}

impl EmbeddingProvider for FallbackEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbedError> {
        Ok(texts.iter().map(|t| fallback_embed(t, self.dim, self.seed).into_inner()).collect())
    }
}
