//! Smoothed tf-idf vectors over syllable tokens.
//!
//! Shared by policy reranking and graph retrieval.

use std::collections::{BTreeMap, HashMap};

/// Lowercased alphanumeric runs. Word-joining underscores split syllables apart.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Document frequencies over a fixed collection.
#[derive(Debug, Clone, Default)]
pub struct CorpusStats {
    n_docs: usize,
    df: HashMap<String, usize>,
}

/// Sparse L2-normalized tf-idf vector.
pub type SparseVector = BTreeMap<String, f64>;

impl CorpusStats {
    pub fn new<S: AsRef<str>>(docs: &[S]) -> Self {
        let mut df: HashMap<String, usize> = HashMap::new();
        for doc in docs {
            let mut terms = tokenize(doc.as_ref());
            terms.sort_unstable();
            terms.dedup();
            for t in terms {
                *df.entry(t).or_default() += 1;
            }
        }
        CorpusStats { n_docs: docs.len(), df }
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    /// `ln((1+N)/(1+df)) + 1`; unseen terms get `df = 0`.
    pub fn idf(&self, term: &str) -> f64 {
        let df = self.df.get(term).copied().unwrap_or(0) as f64;
        ((1.0 + self.n_docs as f64) / (1.0 + df)).ln() + 1.0
    }

    pub fn vectorize(&self, text: &str) -> SparseVector {
        let mut v = SparseVector::new();
        for t in tokenize(text) {
            *v.entry(t).or_insert(0.0) += 1.0;
        }
        for (t, w) in v.iter_mut() {
            *w *= self.idf(t);
        }
        let norm = v.values().map(|w| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for w in v.values_mut() {
                *w /= norm;
            }
        }
        v
    }

    /// Cosine between the tf-idf vectors of `query` and `doc`; 0 when either is empty.
    pub fn cosine(&self, query: &str, doc: &str) -> f64 {
        sparse_dot(&self.vectorize(query), &self.vectorize(doc))
    }
}

pub fn sparse_dot(a: &SparseVector, b: &SparseVector) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.iter().filter_map(|(t, w)| large.get(t).map(|x| w * x)).sum();
    dot.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> CorpusStats {
        CorpusStats::new(&["hủy lớp học phần", "đăng ký học phần mới", "hủy đăng ký lớp"])
    }

    #[test]
    fn tokenizer_splits_joined_words() {
        assert_eq!(tokenize("Đăng_ký môn-học, OK"), vec!["đăng", "ký", "môn", "học", "ok"]);
    }

    #[test]
    fn identical_texts_score_one() {
        let c = corpus();
        assert!((c.cosine("hủy lớp học phần", "hủy lớp học phần") - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disjoint_vocabularies_score_zero() {
        assert_eq!(corpus().cosine("học phí", "lịch thi"), 0.0);
        assert_eq!(corpus().cosine("", "hủy lớp"), 0.0);
    }

    #[test]
    fn idf_is_smoothed() {
        let c = corpus();
        assert!((c.idf("học") - ((4.0f64 / 3.0).ln() + 1.0)).abs() < 1e-15);
        assert!((c.idf("mới") - (2.0f64.ln() + 1.0)).abs() < 1e-15);
        assert!((c.idf("unseen") - (4.0f64.ln() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn hand_corpus_values() {
        let c = corpus();
        assert!((c.cosine("hủy lớp", "hủy lớp học phần") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((c.cosine("đăng_ký học phần", "đăng ký học phần mới") - 0.8355915419449176).abs() < 1e-12);
    }
}
