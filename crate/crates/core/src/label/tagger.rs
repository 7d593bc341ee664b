use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{LabelError, TaggedToken};
use crate::http::JsonClient;
use crate::Utterance;

/// Source of dependency-tagged sentences.
pub trait Tagger: Send + Sync {
    fn tag(&self, utterances: &[&Utterance]) -> Result<Vec<Vec<TaggedToken>>, LabelError>;
}

/// Pre-tagged sentences read from a four-column TSV (form, pos, head, deprel).
///
/// Sentences are separated by blank lines. `# id = …` and `# text = …`
/// comment lines attach keys to the following sentence; lookups try the
/// utterance id first and then its text.
#[derive(Debug, Clone, Default)]
pub struct TaggedCorpus {
    sentences: Vec<Vec<TaggedToken>>,
    by_id: HashMap<String, usize>,
    by_text: HashMap<String, usize>,
}

impl TaggedCorpus {
    pub fn load(path: &Path) -> Result<Self, LabelError> {
        let text = fs::read_to_string(path)
            .map_err(|e| LabelError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, name: &str) -> Result<Self, LabelError> {
        let mut corpus = TaggedCorpus::default();
        let mut tokens = Vec::new();
        let mut id = None;
        let mut sent_text = None;
        let fail = |line: usize, message: String| LabelError::Format { path: name.to_string(), line, message };
        for (lineno, raw) in text.lines().map(|l| l.trim_end_matches('\r')).chain(std::iter::once("")).enumerate() {
            let line = lineno + 1;
            if raw.trim().is_empty() {
                if !tokens.is_empty() {
                    corpus.push(id.take(), sent_text.take(), std::mem::take(&mut tokens));
                } else if id.is_some() || sent_text.is_some() {
                    return Err(fail(line, "sentence header without tokens".into()));
                }
                continue;
            }
            if let Some(comment) = raw.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once('=') {
                    match key.trim() {
                        "id" => id = Some(value.trim().to_string()),
                        "text" => sent_text = Some(value.trim().to_string()),
                        _ => {}
                    }
                }
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 4 {
                return Err(fail(line, format!("expected 4 tab-separated columns, found {}", cols.len())));
            }
            let head = cols[2].trim().parse().map_err(|_| fail(line, format!("bad head {:?}", cols[2])))?;
            tokens.push(TaggedToken { form: cols[0].to_string(), pos: cols[1].to_string(), head, deprel: cols[3].to_string() });
        }
        Ok(corpus)
    }

    fn push(&mut self, id: Option<String>, text: Option<String>, tokens: Vec<TaggedToken>) {
        let idx = self.sentences.len();
        let text = text.unwrap_or_else(|| tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>().join(" "));
        if let Some(id) = id {
            self.by_id.entry(id).or_insert(idx);
        }
        self.by_text.entry(text).or_insert(idx);
        self.sentences.push(tokens);
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn get(&self, id: &str, text: &str) -> Option<&[TaggedToken]> {
        self.by_id.get(id).or_else(|| self.by_text.get(text)).map(|&i| self.sentences[i].as_slice())
    }
}

impl Tagger for TaggedCorpus {
    fn tag(&self, utterances: &[&Utterance]) -> Result<Vec<Vec<TaggedToken>>, LabelError> {
        utterances
            .iter()
            .map(|u| self.get(&u.id, &u.text).map(<[_]>::to_vec).ok_or_else(|| LabelError::MissingTags(u.id.clone())))
            .collect()
    }
}

#[derive(Serialize)]
struct TagRequest<'a> {
    sentences: Vec<&'a str>,
}

#[derive(Deserialize)]
struct TagResponse {
    sentences: Vec<Vec<TaggedToken>>,
}

/// Client for a remote `/tag` endpoint.
#[derive(Debug, Clone)]
pub struct GatewayTagger {
    client: JsonClient,
}

impl GatewayTagger {
    pub fn new(endpoint: &str) -> Self {
        GatewayTagger { client: JsonClient::new(endpoint, Duration::from_secs(60), 3) }
    }

    pub fn with_client(client: JsonClient) -> Self {
        GatewayTagger { client }
    }
}

impl Tagger for GatewayTagger {
    fn tag(&self, utterances: &[&Utterance]) -> Result<Vec<Vec<TaggedToken>>, LabelError> {
        let mut out = Vec::with_capacity(utterances.len());
        for chunk in utterances.chunks(crate::embed::GATEWAY_BATCH) {
            let req = TagRequest { sentences: chunk.iter().map(|u| u.text.as_str()).collect() };
            let resp: TagResponse = self.client.post("/tag", &req).map_err(|f| LabelError::Tagger(f.message))?;
            if resp.sentences.len() != chunk.len() {
                return Err(LabelError::Tagger(format!(
                    "gateway returned {} sentences for {} inputs",
                    resp.sentences.len(),
                    chunk.len()
                )));
            }
            out.extend(resp.sentences);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TSV: &str = "# id = d1#0\n# text = em muốn đăng_ký môn_học\nem\tP\t2\tsub\nmuốn\tV\t0\troot\nđăng_ký\tV\t2\tvmod\nmôn_học\tN\t3\tdob\n\nhủy\tV\t0\troot\nlớp\tN\t1\tdob\n";

    #[test]
    fn parses_sentences_and_keys() {
        let c = TaggedCorpus::parse(TSV, "t.tsv").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("d1#0", "").unwrap()[2].form, "đăng_ký");
        assert_eq!(c.get("zzz", "hủy lớp").unwrap().len(), 2);
        assert!(c.get("zzz", "nothing").is_none());
    }

    #[test]
    fn reports_bad_lines() {
        let err = TaggedCorpus::parse("a\tN\t0\n", "t.tsv").unwrap_err();
        assert!(matches!(err, LabelError::Format { line: 1, .. }));
        let err = TaggedCorpus::parse("a\tN\tx\troot\n", "t.tsv").unwrap_err();
        assert!(matches!(err, LabelError::Format { line: 1, .. }));
    }

    #[test]
    fn missing_sentence_is_an_error() {
        let c = TaggedCorpus::parse(TSV, "t.tsv").unwrap();
        let u = Utterance { id: "x".into(), doc_id: "x".into(), index_in_doc: 0, text: "không có".into(), redactions: vec![] };
        assert!(matches!(c.tag(&[&u]), Err(LabelError::MissingTags(id)) if id == "x"));
    }
}
