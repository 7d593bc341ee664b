use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::jsonl;
use crate::kg::{to_snapshot_string, Graph};

pub const SCHEMA: &str = "forge/1";

/// Header line written at the top of every JSONL artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub schema: String,
    pub stage: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Meta {
    pub fn new(stage: &str, config_hash: &str, seed: u64) -> Self {
        Meta { schema: SCHEMA.to_string(), stage: stage.to_string(), config_hash: config_hash.to_string(), seed }
    }

    pub fn for_stage(&self, stage: &str) -> Self {
        Meta { stage: stage.to_string(), ..self.clone() }
    }
}

#[derive(Serialize, Deserialize)]
struct MetaLine {
    #[serde(rename = "_meta")]
    meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub id: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: String,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub id: String,
    pub cluster: i64,
    pub prob: f64,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Artifact(format!("{}: {e}", path.display()))
}

pub fn write_artifact<T: Serialize>(path: &Path, meta: &Meta, items: &[T]) -> Result<(), PipelineError> {
    let f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer(&mut w, &MetaLine { meta: meta.clone() }).map_err(|e| io_err(path, e))?;
    w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    jsonl::write_to(&mut w, items).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Graph snapshot text preceded by a header line.
pub fn snapshot_with_meta(meta: &Meta, g: &Graph) -> String {
    let header = serde_json::to_string(&MetaLine { meta: meta.clone() }).expect("meta serializes");
    format!("{header}\n{}", to_snapshot_string(g))
}

/// Reads a JSONL file, returning its header when the first line is one.
pub fn read_artifact<T: DeserializeOwned>(path: &Path) -> Result<(Option<Meta>, Vec<T>), PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut meta = None;
    let mut body = text.as_str();
    if let Some(first) = text.lines().next() {
        if first.trim_start().starts_with("{\"_meta\"") {
            let line: MetaLine = serde_json::from_str(first).map_err(|e| io_err(path, format!("line 1: {e}")))?;
            meta = Some(line.meta);
            body = &text[first.len()..];
        }
    }
    // the body keeps the header's newline, so line numbers stay those of the file
    let items = jsonl::read_from(body.as_bytes(), &path.display().to_string())
        .map_err(|e| PipelineError::Artifact(e.to_string()))?;
    Ok((meta, items))
}

/// Refuses to combine artifacts written under different configurations.
/// Returns the shared header, if any input had one.
pub fn ensure_same_run(inputs: &[(&Path, &Option<Meta>)]) -> Result<Option<Meta>, PipelineError> {
    let mut first: Option<(&Path, &Meta)> = None;
    for (path, meta) in inputs {
        let Some(m) = meta else { continue };
        if m.schema != SCHEMA {
            return Err(PipelineError::Artifact(format!("{}: unsupported schema {:?}", path.display(), m.schema)));
        }
        match first {
            None => first = Some((path, m)),
            Some((p0, m0)) if m0.config_hash != m.config_hash => {
                return Err(PipelineError::HashMismatch {
                    first: p0.display().to_string(),
                    second: path.display().to_string(),
                    expected: m0.config_hash.clone(),
                    found: m.config_hash.clone(),
                })
            }
            _ => {}
        }
    }
    Ok(first.map(|(_, m)| m.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.jsonl");
        let b = dir.path().join("b.jsonl");
        let recs = vec![ClusterRecord { id: "x".into(), cluster: 0, prob: 1.0 }];
        write_artifact(&a, &Meta::new("cluster", "h1", 1), &recs).unwrap();
        write_artifact(&b, &Meta::new("embed", "h2", 1), &recs).unwrap();
        let text = fs::read_to_string(&a).unwrap();
        assert!(text.starts_with(r#"{"_meta":{"schema":"forge/1","stage":"cluster","config_hash":"h1","seed":1}}"#));
        let (ma, ra): (_, Vec<ClusterRecord>) = read_artifact(&a).unwrap();
        let (mb, _): (_, Vec<ClusterRecord>) = read_artifact(&b).unwrap();
        assert_eq!(ra, recs);
        assert!(ensure_same_run(&[(&a, &ma), (&a, &ma)]).unwrap().is_some());
        assert!(matches!(ensure_same_run(&[(&a, &ma), (&b, &mb)]), Err(PipelineError::HashMismatch { .. })));
        assert!(ensure_same_run(&[(&a, &ma), (&b, &None)]).is_ok());
    }

    #[test]
    fn plain_jsonl_has_no_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.jsonl");
        fs::write(&p, "{\"id\":\"a\",\"cluster\":1,\"prob\":0.5}\n").unwrap();
        let (m, r): (_, Vec<ClusterRecord>) = read_artifact(&p).unwrap();
        assert!(m.is_none());
        assert_eq!(r[0].cluster, 1);
    }
}
