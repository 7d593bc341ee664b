use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::LabelError;

/// Inclusive n-gram word-length range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramRange {
    pub lo: usize,
    pub hi: usize,
}

impl NgramRange {
    pub const UNIGRAM: NgramRange = NgramRange { lo: 1, hi: 1 };
    pub const SHORT: NgramRange = NgramRange { lo: 5, hi: 7 };
    pub const LONG: NgramRange = NgramRange { lo: 4, hi: 11 };

    pub fn new(lo: usize, hi: usize) -> Result<Self, LabelError> {
        if lo == 0 || lo > hi {
            return Err(LabelError::InvalidRange { lo, hi });
        }
        Ok(NgramRange { lo, hi })
    }

    /// Parses `lo:hi`.
    pub fn parse(s: &str) -> Result<Self, LabelError> {
        let bad = || LabelError::InvalidRange { lo: 0, hi: 0 };
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let lo = a.trim().parse().map_err(|_| bad())?;
        let hi = b.trim().parse().map_err(|_| bad())?;
        Self::new(lo, hi)
    }
}

impl Default for NgramRange {
    fn default() -> Self {
        NgramRange::SHORT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyword {
    pub term: String,
    pub score: f64,
}

/// Per-cluster keywords sorted by descending score, ties by term.
pub type KeywordTable = BTreeMap<i64, Vec<Keyword>>;

/// Lowercased whitespace tokens with surrounding punctuation removed.
/// Underscores inside joined words are kept.
pub fn keyword_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !(c.is_alphanumeric() || c == '_')).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

fn ngrams(tokens: &[String], range: NgramRange, out: &mut HashMap<String, usize>) -> usize {
    let mut total = 0;
    for n in range.lo..=range.hi {
        for w in tokens.windows(n) {
            *out.entry(w.join(" ")).or_default() += 1;
            total += 1;
        }
    }
    total
}

/// Class-based tf-idf: `tf(t,c) * ln(1 + A / f(t))` where `A` is the mean
/// number of terms per class and `f(t)` the count of `t` over all classes.
///
/// Each class is a list of token sequences; n-grams never cross sequence
/// boundaries.
pub fn ctfidf(classes: &BTreeMap<i64, Vec<Vec<String>>>, range: NgramRange) -> Result<KeywordTable, LabelError> {
    if classes.is_empty() {
        return Err(LabelError::EmptyCorpus);
    }
    let mut per_class: BTreeMap<i64, HashMap<String, usize>> = BTreeMap::new();
    let mut totals = 0usize;
    let mut global: HashMap<String, usize> = HashMap::new();
    for (&c, docs) in classes {
        let counts = per_class.entry(c).or_default();
        for doc in docs {
            totals += ngrams(doc, range, counts);
        }
        for (t, n) in counts.iter() {
            *global.entry(t.clone()).or_default() += n;
        }
    }
    if totals == 0 {
        return Err(LabelError::EmptyCorpus);
    }
    let avg = totals as f64 / classes.len() as f64;
    Ok(per_class
        .into_iter()
        .map(|(c, counts)| {
            let mut kws: Vec<Keyword> = counts
                .into_iter()
                .map(|(term, tf)| {
                    let score = tf as f64 * (1.0 + avg / global[&term] as f64).ln();
                    Keyword { term, score }
                })
                .collect();
            kws.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
            (c, kws)
        })
        .collect())
}
