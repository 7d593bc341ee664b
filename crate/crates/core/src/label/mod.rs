//! Cluster naming: cTF-IDF keywords, representative sentences, dependency
//! element extraction and most-frequent-token labels.

mod ctfidf;
mod elements;
mod tagger;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ctfidf::{ctfidf, keyword_tokens, Keyword, KeywordTable, NgramRange};
pub use elements::{extract_sentence_elements, relevant_positions, ElementConfig, SentenceElements};
pub use tagger::{GatewayTagger, TaggedCorpus, Tagger};

use crate::Utterance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub form: String,
    pub pos: String,
    pub head: usize,
    pub deprel: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LabelError {
    #[error("no terms to score")]
    EmptyCorpus,
    #[error("cluster has no members")]
    EmptyCluster,
    #[error("invalid n-gram range {lo}:{hi}")]
    InvalidRange { lo: usize, hi: usize },
    #[error("sentence has no root token")]
    NoRoot,
    #[error("sentence has more than one root token")]
    MultipleRoots,
    #[error("token {position} has head {head} outside the sentence")]
    InvalidHead { position: usize, head: usize },
    #[error("no sentence yielded any elements")]
    NoExtractableElements,
    #[error("no tags for utterance {0:?}")]
    MissingTags(String),
    #[error("tagger failed: {0}")]
    Tagger(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("format error at {path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
}

fn underscore_normalize(text: &str) -> String {
    let joined = text.to_lowercase().split_whitespace().collect::<Vec<_>>().join("_");
    format!("_{joined}_")
}

/// Top `m` members by summed score of the keywords they contain, ties by
/// lower utterance id.
pub fn representative_sentences<'a>(
    members: &[&'a Utterance],
    keywords: &[Keyword],
    m: usize,
) -> Result<Vec<&'a Utterance>, LabelError> {
    if members.is_empty() {
        return Err(LabelError::EmptyCluster);
    }
    let needles: Vec<(String, f64)> = keywords.iter().map(|k| (underscore_normalize(&k.term), k.score)).collect();
    let mut scored: Vec<(f64, &'a Utterance)> = members
        .iter()
        .map(|u| {
            let hay = underscore_normalize(&u.text);
            (needles.iter().filter(|(n, _)| hay.contains(n.as_str())).map(|(_, s)| s).sum(), *u)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.id.cmp(&b.1.id)));
    Ok(scored.into_iter().take(m).map(|(_, u)| u).collect())
}

fn top(counts: &HashMap<String, usize>) -> Option<&str> {
    counts.iter().max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0))).map(|(k, _)| k.as_str())
}

fn tally(counts: &mut HashMap<String, usize>, forms: &[String]) {
    for f in forms {
        *counts.entry(f.to_lowercase()).or_default() += 1;
    }
}

/// Candidate labels for one cluster from its tagged representative sentences.
///
/// The first label pairs the most frequent verb modifier (or verb) with the
/// most frequent direct object. Every further action/object pair seen in at
/// least two sentences becomes an extra label.
pub fn label_cluster(reps: &[Vec<TaggedToken>], cfg: &ElementConfig) -> Result<Vec<String>, LabelError> {
    let elements: Vec<SentenceElements> =
        reps.iter().filter_map(|s| extract_sentence_elements(s, cfg).ok()).filter(|e| !e.is_empty()).collect();
    if elements.is_empty() {
        return Err(LabelError::NoExtractableElements);
    }
    let (mut verbs, mut vmods, mut dobs, mut others) = Default::default();
    let mut pairs: HashMap<(String, String), usize> = HashMap::new();
    for e in &elements {
        tally(&mut verbs, &e.verbs);
        tally(&mut vmods, &e.verb_modifiers);
        tally(&mut dobs, &e.direct_objects);
        tally(&mut others, &e.others);
        let actions = if e.verb_modifiers.is_empty() { &e.verbs } else { &e.verb_modifiers };
        let mut seen: Vec<(String, String)> = actions
            .iter()
            .flat_map(|a| e.direct_objects.iter().map(move |d| (a.to_lowercase(), d.to_lowercase())))
            .collect();
        seen.sort();
        seen.dedup();
        for p in seen {
            *pairs.entry(p).or_default() += 1;
        }
    }
    let action = top(&vmods).or_else(|| top(&verbs));
    let primary = match (action, top(&dobs)) {
        (Some(a), Some(d)) => format!("{a} {d}"),
        (Some(a), None) => a.to_string(),
        (None, Some(d)) => d.to_string(),
        (None, None) => top(&others).ok_or(LabelError::NoExtractableElements)?.to_string(),
    };
    let mut extra: Vec<(&(String, String), &usize)> = pairs.iter().filter(|(_, &c)| c >= 2).collect();
    extra.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let mut labels = vec![primary];
    for ((a, d), _) in extra {
        let l = format!("{a} {d}");
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    Ok(labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentEntity {
    pub id: String,
    pub label: String,
    pub cluster_ids: Vec<i64>,
    pub support: usize,
}

/// Labels proposed for one cluster, with its member count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabels {
    pub cluster: i64,
    pub support: usize,
    pub labels: Vec<String>,
}

pub fn normalize_label(label: &str) -> String {
    label.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Merges labels that agree after lowercasing and whitespace collapsing.
/// Intents are numbered in order of first appearance.
pub fn dedup_intents(candidates: &[ClusterLabels]) -> Vec<IntentEntity> {
    let mut out: Vec<IntentEntity> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for c in candidates {
        for l in &c.labels {
            let key = normalize_label(l);
            if key.is_empty() {
                continue;
            }
            match index.get(&key) {
                Some(&i) => {
                    let e = &mut out[i];
                    if !e.cluster_ids.contains(&c.cluster) {
                        e.cluster_ids.push(c.cluster);
                        e.support += c.support;
                    }
                }
                None => {
                    index.insert(key.clone(), out.len());
                    out.push(IntentEntity { id: String::new(), label: key, cluster_ids: vec![c.cluster], support: c.support });
                }
            }
        }
    }
    for (i, e) in out.iter_mut().enumerate() {
        e.id = format!("intent_{:04}", i + 1);
        e.cluster_ids.sort_unstable();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelConfig {
    pub ngram: NgramRange,
    pub top_keywords: usize,
    pub reps: usize,
    #[serde(default)]
    pub elements: ElementConfig,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig { ngram: NgramRange::SHORT, top_keywords: 10, reps: 7, elements: ElementConfig::default() }
    }
}

/// Everything the label stage learned about one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub cluster: i64,
    pub size: usize,
    pub keywords: Vec<Keyword>,
    pub representatives: Vec<String>,
    pub labels: Vec<String>,
    pub unlabeled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelOutput {
    pub clusters: Vec<ClusterSummary>,
    pub intents: Vec<IntentEntity>,
}

/// Labels every non-noise cluster. `assignments[i]` is the cluster of
/// `utterances[i]`, with `-1` for noise.
pub fn label_clusters(
    utterances: &[Utterance],
    assignments: &[i64],
    tagger: &dyn Tagger,
    cfg: &LabelConfig,
) -> Result<LabelOutput, LabelError> {
    let mut groups: BTreeMap<i64, Vec<&Utterance>> = BTreeMap::new();
    for (u, &c) in utterances.iter().zip(assignments) {
        if c >= 0 {
            groups.entry(c).or_default().push(u);
        }
    }
    let docs: BTreeMap<i64, Vec<Vec<String>>> =
        groups.iter().map(|(&c, us)| (c, us.iter().map(|u| keyword_tokens(&u.text)).collect())).collect();
    let table = match ctfidf(&docs, cfg.ngram) {
        Ok(t) => t,
        Err(LabelError::EmptyCorpus) => KeywordTable::new(),
        Err(e) => return Err(e),
    };
    let clusters: Vec<ClusterSummary> = groups
        .par_iter()
        .map(|(&c, members)| {
            let keywords: Vec<Keyword> =
                table.get(&c).map(|k| k.iter().take(cfg.top_keywords).cloned().collect()).unwrap_or_default();
            let reps = representative_sentences(members, &keywords, cfg.reps)?;
            let tagged = tagger.tag(&reps)?;
            let (labels, unlabeled) = match label_cluster(&tagged, &cfg.elements) {
                Ok(l) => (l, false),
                Err(LabelError::NoExtractableElements) => (Vec::new(), true),
                Err(e) => return Err(e),
            };
            Ok(ClusterSummary {
                cluster: c,
                size: members.len(),
                keywords,
                representatives: reps.iter().map(|u| u.id.clone()).collect(),
                labels,
                unlabeled,
            })
        })
        .collect::<Result<_, LabelError>>()?;
    let candidates: Vec<ClusterLabels> = clusters
        .iter()
        .map(|s| ClusterLabels { cluster: s.cluster, support: s.size, labels: s.labels.clone() })
        .collect();
    let intents = dedup_intents(&candidates);
    Ok(LabelOutput { clusters, intents })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn utt(id: &str, text: &str) -> Utterance {
        Utterance { id: id.into(), doc_id: "d".into(), index_in_doc: 0, text: text.into(), redactions: vec![] }
    }

    fn kw(term: &str, score: f64) -> Keyword {
        Keyword { term: term.into(), score }
    }

    fn tok(form: &str, head: usize, deprel: &str) -> TaggedToken {
        TaggedToken { form: form.into(), pos: "X".into(), head, deprel: deprel.into() }
    }

    fn action_object(a: &str, d: &str) -> Vec<TaggedToken> {
        vec![tok("em", 2, "sub"), tok("muốn", 0, "root"), tok(a, 2, "vmod"), tok(d, 3, "dob")]
    }

    #[test]
    fn small_cluster_returns_everyone() {
        let us = [utt("a", "x"), utt("b", "y"), utt("c", "z")];
        let refs: Vec<&Utterance> = us.iter().collect();
        assert_eq!(representative_sentences(&refs, &[kw("x", 1.0)], 7).unwrap().len(), 3);
        assert!(matches!(representative_sentences(&[], &[], 7), Err(LabelError::EmptyCluster)));
    }

    #[test]
    fn representative_golden_fixture() {
        let texts = [
            "em muốn đăng_ký môn_học",
            "hủy lớp giúp em",
            "đăng_ký học lại",
            "xin bảng_điểm",
            "đăng_ký môn_học kỳ hè",
            "môn_học này khó",
            "hủy lớp và đăng_ký",
            "Học phí bao nhiêu",
            "đăng_kýxyz",
            "lớp học",
        ];
        let us: Vec<Utterance> = texts.iter().enumerate().map(|(i, t)| utt(&format!("u{i:02}"), t)).collect();
        let refs: Vec<&Utterance> = us.iter().rev().collect();
        let kws = [kw("đăng_ký", 3.0), kw("môn_học", 2.0), kw("hủy lớp", 1.5), kw("học", 0.5)];
        let got: Vec<&str> = representative_sentences(&refs, &kws, 7).unwrap().iter().map(|u| u.id.as_str()).collect();
        assert_eq!(got, vec!["u00", "u04", "u06", "u02", "u05", "u01", "u07"]);
    }

    #[test]
    fn unanimous_reps_give_one_label() {
        let reps: Vec<_> = (0..7).map(|_| action_object("đăng_ký", "môn_học")).collect();
        assert_eq!(label_cluster(&reps, &ElementConfig::default()).unwrap(), vec!["đăng_ký môn_học"]);
    }

    #[test]
    fn split_reps_give_two_labels() {
        let mut reps: Vec<_> = (0..3).map(|_| action_object("hủy", "lớp")).collect();
        reps.extend((0..3).map(|_| action_object("chuyển", "lớp")));
        assert_eq!(label_cluster(&reps, &ElementConfig::default()).unwrap(), vec!["chuyển lớp", "hủy lớp"]);
    }

    #[test]
    fn unparseable_reps_are_unlabeled() {
        let reps = vec![vec![tok("a", 0, "sub")], vec![]];
        assert!(matches!(label_cluster(&reps, &ElementConfig::default()), Err(LabelError::NoExtractableElements)));
    }

    #[test]
    fn labeling_is_order_independent() {
        let mut reps = vec![action_object("xin", "bảng_điểm"), action_object("in", "bảng_điểm"), action_object("xin", "giấy")];
        let a = label_cluster(&reps, &ElementConfig::default()).unwrap();
        reps.reverse();
        assert_eq!(a, label_cluster(&reps, &ElementConfig::default()).unwrap());
        assert_eq!(a, vec!["xin bảng_điểm"]);
    }

    #[test]
    fn dedup_merges_normalized_labels() {
        let c = |cluster, labels: &[&str]| ClusterLabels {
            cluster,
            support: 10,
            labels: labels.iter().map(|s| s.to_string()).collect(),
        };
        let out = dedup_intents(&[c(0, &["Hủy lớp"]), c(1, &["hủy  lớp"])]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].cluster_ids, vec![0, 1]);
        assert_eq!(out[0].support, 20);
        assert_eq!(dedup_intents(&[c(0, &["a b"]), c(1, &["c d"])]).len(), 2);
    }

    #[test]
    fn dedup_twelve_labels_three_duplicates() {
        let labels = [
            "đăng_ký môn_học", "hủy lớp", "xin bảng_điểm", "đóng học_phí", "Hủy Lớp", "chuyển lớp",
            "xem lịch_thi", "đăng_ký  môn_học", "nộp đơn", "XIN bảng_điểm", "gia_hạn học_phí", "rút môn_học",
        ];
        let cands: Vec<ClusterLabels> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| ClusterLabels { cluster: i as i64, support: 1, labels: vec![l.to_string()] })
            .collect();
        assert_eq!(dedup_intents(&cands).len(), 9);
    }
}
