//! Intent-to-policy relation discovery: cosine threshold on embeddings,
//! then tf-idf reranking of the survivors.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{embed_batch, EmbedError, EmbeddingProvider, Vector};
use crate::jsonl::{self, JsonlError};
use crate::label::IntentEntity;
use crate::tfidf::CorpusStats;

/// Policy text beyond this many whitespace tokens is not embedded.
pub const EMBED_TOKEN_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyEntity {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub body: String,
}

impl PolicyEntity {
    pub fn full_text(&self) -> String {
        if self.body.is_empty() {
            self.title.clone()
        } else {
            format!("{} {}", self.title, self.body)
        }
    }

    /// Title and body, cut to the first [`EMBED_TOKEN_LIMIT`] tokens.
    pub fn embed_text(&self) -> String {
        self.full_text().split_whitespace().take(EMBED_TOKEN_LIMIT).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub intent_id: String,
    pub policy_id: String,
    pub embed_score: f64,
    pub rerank_score: f64,
    pub rank: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum RelateError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("threshold {0} outside (-1, 1)")]
    InvalidThreshold(f64),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("no {0} to relate")]
    EmptyInput(&'static str),
    #[error("policy {0:?} has an empty title")]
    EmptyTitle(String),
    #[error("unknown id {0:?}")]
    UnknownId(String),
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("format error at {path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelateParams {
    pub threshold: f64,
    pub top_k: usize,
    /// Weight of the embedding cosine in the rerank blend.
    pub alpha: f64,
}

impl Default for RelateParams {
    fn default() -> Self {
        RelateParams { threshold: 0.32, top_k: 10, alpha: 0.5 }
    }
}

impl RelateParams {
    pub fn validate(&self) -> Result<(), RelateError> {
        if !(self.threshold > -1.0 && self.threshold < 1.0) {
            return Err(RelateError::InvalidThreshold(self.threshold));
        }
        if self.top_k == 0 {
            return Err(RelateError::InvalidParams("top_k must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(RelateError::InvalidParams(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        Ok(())
    }
}

/// Embeds intent labels and policy texts, then relates them.
pub fn discover_relations(
    intents: &[IntentEntity],
    policies: &[PolicyEntity],
    provider: &dyn EmbeddingProvider,
    params: &RelateParams,
) -> Result<Vec<Relation>, RelateError> {
    params.validate()?;
    if intents.is_empty() {
        return Err(RelateError::EmptyInput("intents"));
    }
    if policies.is_empty() {
        return Err(RelateError::EmptyInput("policies"));
    }
    let labels: Vec<String> = intents.iter().map(|i| i.label.clone()).collect();
    let texts: Vec<String> = policies.iter().map(PolicyEntity::embed_text).collect();
    let iv = embed_batch(provider, &labels)?;
    let pv = embed_batch(provider, &texts)?;
    discover_with_vectors(intents, &iv, policies, &pv, params)
}

/// Relation discovery over precomputed unit vectors.
pub fn discover_with_vectors(
    intents: &[IntentEntity],
    intent_vecs: &[Vector],
    policies: &[PolicyEntity],
    policy_vecs: &[Vector],
    params: &RelateParams,
) -> Result<Vec<Relation>, RelateError> {
    params.validate()?;
    if intents.len() != intent_vecs.len() || policies.len() != policy_vecs.len() {
        return Err(RelateError::InvalidParams("entity and vector counts differ".into()));
    }
    let full: Vec<String> = policies.iter().map(PolicyEntity::full_text).collect();
    let stats = CorpusStats::new(&full);
    let per_intent: Vec<Vec<Relation>> = intents
        .par_iter()
        .zip(intent_vecs)
        .map(|(intent, iv)| {
            let mut cands: Vec<(usize, f64)> = policy_vecs
                .iter()
                .enumerate()
                .map(|(p, pv)| (p, iv.dot(pv).clamp(-1.0, 1.0)))
                .filter(|&(_, c)| c >= params.threshold)
                .collect();
            let by_id = |a: usize, b: usize| policies[a].id.cmp(&policies[b].id);
            cands.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| by_id(a.0, b.0)));
            cands.truncate(params.top_k);
            let mut scored: Vec<(usize, f64, f64)> = cands
                .into_iter()
                .map(|(p, c)| (p, c, params.alpha * c + (1.0 - params.alpha) * stats.cosine(&intent.label, &full[p])))
                .collect();
            scored.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(Ordering::Equal).then_with(|| by_id(a.0, b.0)));
            scored
                .into_iter()
                .enumerate()
                .map(|(r, (p, c, s))| Relation {
                    intent_id: intent.id.clone(),
                    policy_id: policies[p].id.clone(),
                    embed_score: c,
                    rerank_score: s,
                    rank: r + 1,
                })
                .collect()
        })
        .collect();
    Ok(per_intent.into_iter().flatten().collect())
}

/// Summary counts in the shape of a relation-discovery results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub entity_pair: [String; 2],
    pub entities: [usize; 2],
    pub discovered: usize,
    pub non_associative: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlooked: Option<usize>,
}

/// `non_associative` counts intents without relations; `overlooked` counts
/// gold pairs whose intent has none.
pub fn relation_metrics(
    relations: &[Relation],
    intents: &[IntentEntity],
    policies: &[PolicyEntity],
    gold: Option<&[(String, String)]>,
) -> Result<RelationReport, RelateError> {
    let intent_ids: HashSet<&str> = intents.iter().map(|i| i.id.as_str()).collect();
    let policy_ids: HashSet<&str> = policies.iter().map(|p| p.id.as_str()).collect();
    let check = |id: &str, set: &HashSet<&str>| {
        if set.contains(id) {
            Ok(())
        } else {
            Err(RelateError::UnknownId(id.to_string()))
        }
    };
    let mut related: BTreeSet<&str> = BTreeSet::new();
    for r in relations {
        check(&r.intent_id, &intent_ids)?;
        check(&r.policy_id, &policy_ids)?;
        related.insert(&r.intent_id);
    }
    let overlooked = match gold {
        Some(pairs) if !pairs.is_empty() => {
            for (i, p) in pairs {
                check(i, &intent_ids)?;
                check(p, &policy_ids)?;
            }
            Some(pairs.iter().filter(|(i, _)| !related.contains(i.as_str())).count())
        }
        _ => None,
    };
    Ok(RelationReport {
        entity_pair: ["Intent".into(), "Policy".into()],
        entities: [intents.len(), policies.len()],
        discovered: relations.len(),
        non_associative: intents.len() - related.len(),
        overlooked,
    })
}

pub fn load_policies(path: &Path) -> Result<Vec<PolicyEntity>, RelateError> {
    let policies: Vec<PolicyEntity> = jsonl::read(path)?;
    let mut seen = HashMap::new();
    for p in &policies {
        if p.title.trim().is_empty() {
            return Err(RelateError::EmptyTitle(p.id.clone()));
        }
        if seen.insert(p.id.as_str(), ()).is_some() {
            return Err(RelateError::InvalidParams(format!("duplicate policy id {:?}", p.id)));
        }
    }
    Ok(policies)
}

/// Gold pairs as `intent_id<TAB>policy_id` lines; blank and `#` lines skipped.
pub fn load_gold(path: &Path) -> Result<Vec<(String, String)>, RelateError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| RelateError::Io { path: name.clone(), message: e.to_string() })?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (i, p) = line.split_once('\t').ok_or_else(|| RelateError::Format {
            path: name.clone(),
            line: n + 1,
            message: "expected intent_id<TAB>policy_id".into(),
        })?;
        out.push((i.trim().to_string(), p.trim().to_string()));
    }
    Ok(out)
}
