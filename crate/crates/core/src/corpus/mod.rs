//! Corpus ingestion: sentence splitting, word joining and PII censoring.
//!
//! Each document is split into sentences, noisy fragments are dropped, known
//! multi-syllable words are joined with `_`, and personally identifiable
//! information is replaced by fixed placeholder terms. Censoring runs last so
//! the digit rules see raw digit runs.

mod anonymize;
mod segment;
mod split;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use anonymize::{
    anonymize, default_rules, AnonymizeError, CensorMethod, CensorRule, GazetteerTagger, NameTagger, PiiKind,
    Redaction,
};
pub use segment::{segment_words, Lexicon};
pub use split::{split_sentences, Abbreviations, NoiseFilter};

use crate::jsonl::{self, JsonlError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    FaqHelpdesk,
    PortalWeb,
    Lms,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub source: Source,
    pub text: String,
}

/// One preprocessed sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub doc_id: String,
    #[serde(default)]
    pub index_in_doc: usize,
    pub text: String,
    #[serde(default)]
    pub redactions: Vec<Redaction>,
}

impl Utterance {
    pub fn make_id(doc_id: &str, index: usize) -> String {
        format!("{doc_id}#{index}")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("format error at {path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("empty document id at {path}:{line}")]
    EmptyId { path: String, line: usize },
    #[error("corpus config lists no input files")]
    NoInputs,
    #[error(transparent)]
    Anonymize(#[from] AnonymizeError),
}

impl From<JsonlError> for CorpusError {
    fn from(e: JsonlError) -> Self {
        match e {
            JsonlError::Io { path, source } => CorpusError::Io { path, source },
            JsonlError::Format { path, line, message } => CorpusError::Format { path, line, message },
        }
    }
}

/// Everything needed to turn a raw document into utterances.
pub struct Preprocessor {
    pub abbreviations: Abbreviations,
    pub lexicon: Lexicon,
    pub noise: NoiseFilter,
    pub rules: Vec<CensorRule>,
    pub tagger: Option<Box<dyn NameTagger>>,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Preprocessor {
            abbreviations: Abbreviations::vietnamese(),
            lexicon: Lexicon::default(),
            noise: NoiseFilter::default(),
            rules: default_rules(false),
            tagger: None,
        }
    }
}

impl Preprocessor {
    /// Split, filter, segment and censor one document.
    pub fn process(&self, doc: &RawDocument) -> Result<Vec<Utterance>, CorpusError> {
        let mut out = Vec::new();
        for sentence in split_sentences(&doc.text, &self.abbreviations) {
            if !self.noise.keep(&sentence) {
                continue;
            }
            let segmented = segment_words(&sentence, &self.lexicon);
            let (text, redactions) = anonymize(&segmented, &self.rules, self.tagger.as_deref())?;
            let index = out.len();
            out.push(Utterance { id: Utterance::make_id(&doc.id, index), doc_id: doc.id.clone(), index_in_doc: index, text, redactions });
        }
        Ok(out)
    }

    /// Processes documents in parallel; output is ordered by (doc_id, index).
    pub fn process_all(&self, docs: &[RawDocument]) -> Result<Vec<Utterance>, CorpusError> {
        let mut seen = HashSet::new();
        for d in docs {
            if !seen.insert(d.id.as_str()) {
                return Err(CorpusError::DuplicateId(d.id.clone()));
            }
        }
        let mut order: Vec<&RawDocument> = docs.iter().collect();
        order.sort_by(|a, b| a.id.cmp(&b.id));
        let per_doc: Vec<Vec<Utterance>> =
            order.par_iter().map(|d| self.process(d)).collect::<Result<_, _>>()?;
        Ok(per_doc.into_iter().flatten().collect())
    }
}

/// Reads a JSONL document file.
pub fn load_documents(path: &Path) -> Result<Vec<RawDocument>, CorpusError> {
    let docs: Vec<RawDocument> = jsonl::read(path)?;
    let text = fs::read_to_string(path).map_err(|e| CorpusError::Io { path: path.display().to_string(), source: e })?;
    // map record index back to its physical line for error reporting
    let lines: Vec<usize> =
        text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(i, _)| i + 1).collect();
    for (doc, line) in docs.iter().zip(lines) {
        if doc.id.is_empty() {
            return Err(CorpusError::EmptyId { path: path.display().to_string(), line });
        }
    }
    Ok(docs)
}

/// Ingestion settings, usually read from a JSON or TOML file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub inputs: Vec<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    /// Gazetteer of person names; enables the name rule when set.
    pub names: Option<PathBuf>,
    pub noise: NoiseFilter,
    pub ner: bool,
}

impl CorpusConfig {
    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = read(path)?;
        let mut cfg: CorpusConfig = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text)
                .map_err(|e| CorpusError::Format { path: path.display().to_string(), line: 0, message: e.to_string() })?
        } else {
            serde_json::from_str(&text).map_err(|e| CorpusError::Format {
                path: path.display().to_string(),
                line: e.line(),
                message: e.to_string(),
            })?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        Ok(cfg)
    }

    /// Makes relative paths relative to `base`.
    pub fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.inputs.iter_mut().for_each(fix);
        for p in [&mut self.lexicon, &mut self.abbreviations, &mut self.names].into_iter().flatten() {
            fix(p);
        }
    }

    pub fn preprocessor(&self) -> Result<Preprocessor, CorpusError> {
        let mut pre = Preprocessor { noise: self.noise, ..Preprocessor::default() };
        if let Some(p) = &self.lexicon {
            pre.lexicon = Lexicon::parse(&read(p)?);
        }
        if let Some(p) = &self.abbreviations {
            pre.abbreviations = Abbreviations::parse(&read(p)?);
        }
        if self.ner {
            if let Some(p) = &self.names {
                pre.tagger = Some(Box::new(GazetteerTagger::parse(&read(p)?)));
            }
            pre.rules = default_rules(true);
        }
        Ok(pre)
    }
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::Io { path: path.display().to_string(), source: e })
}

/// Loads and preprocesses every input named by the config file at `path`.
pub fn load_corpus(path: &Path) -> Result<Vec<Utterance>, CorpusError> {
    let cfg = CorpusConfig::from_file(path)?;
    ingest(&cfg)
}

pub fn ingest(cfg: &CorpusConfig) -> Result<Vec<Utterance>, CorpusError> {
    if cfg.inputs.is_empty() {
        return Err(CorpusError::NoInputs);
    }
    let pre = cfg.preprocessor()?;
    let mut docs = Vec::new();
    for input in &cfg.inputs {
        docs.extend(load_documents(input)?);
    }
    pre.process_all(&docs)
}
