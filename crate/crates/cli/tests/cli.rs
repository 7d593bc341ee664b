use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn faq(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/faq").join(name).to_string_lossy().into_owned()
}

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = forge(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

/// ingest → embed → reduce → cluster, shared by the tests below.
fn upstream(dir: &Path, min_tokens: &str) {
    ok(&[
        "ingest", "--in", &faq("faq.jsonl"), "--lexicon", &faq("lexicon.txt"), "--names", &faq("names.txt"),
        "--min-tokens", min_tokens, "--out", &p(dir, "utterances.jsonl"),
    ]);
    ok(&["embed", "--in", &p(dir, "utterances.jsonl"), "--provider", "fallback:256", "--out", &p(dir, "embeddings.jsonl")]);
    ok(&["reduce", "--in", &p(dir, "embeddings.jsonl"), "--out", &p(dir, "reduced.jsonl")]);
    ok(&["cluster", "--in", &p(dir, "reduced.jsonl"), "--min-cluster-size", "8", "--min-samples", "5", "--out", &p(dir, "clusters.jsonl")]);
}

#[test]
fn stages_chain_through_to_graph_queries() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    upstream(d, "3");
    let labels = ok(&[
        "label", "--utterances", &p(d, "utterances.jsonl"), "--clusters", &p(d, "clusters.jsonl"), "--tags",
        &faq("tags.tsv"), "--out", &p(d, "intents.jsonl"),
    ]);
    for planted in ["đăng_ký môn_học", "hủy lớp_học", "xin bảng_điểm", "đóng học_phí"] {
        assert!(labels.contains(planted), "{labels}");
    }
    let report = ok(&[
        "relate", "--intents", &p(d, "intents.jsonl"), "--policies", &faq("policies.jsonl"), "--gold", &faq("gold.tsv"),
        "--out", &p(d, "relations.jsonl"),
    ]);
    let report: serde_json::Value = serde_json::from_str(report.trim()).unwrap();
    assert_eq!(report["entities"], serde_json::json!([4, 5]));
    assert_eq!(report["overlooked"], 0);
    ok(&[
        "graph", "build", "--intents", &p(d, "intents.jsonl"), "--policies", &faq("policies.jsonl"), "--relations",
        &p(d, "relations.jsonl"), "--out", &p(d, "graph.jsonl"),
    ]);
    let rows = ok(&["graph", "query", "--graph", &p(d, "graph.jsonl"), "--q", "MATCH (i:Intent)-[:RELATED_POLICY]->(p:Policy) RETURN i, p"]);
    assert!(rows.lines().count() >= 4, "{rows}");
    assert!(rows.contains("pol_cancel"));
}

#[test]
fn artifacts_from_different_runs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    std::fs::create_dir_all(&a).unwrap();
    std::fs::create_dir_all(&b).unwrap();
    upstream(&a, "3");
    upstream(&b, "2");
    let out = forge(&[
        "label", "--utterances", &p(&a, "utterances.jsonl"), "--clusters", &p(&b, "clusters.jsonl"), "--tags",
        &faq("tags.tsv"), "--out", &p(dir.path(), "intents.jsonl"),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_tags_file_exits_with_three_and_names_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    upstream(d, "3");
    let out = forge(&[
        "label", "--utterances", &p(d, "utterances.jsonl"), "--clusters", &p(d, "clusters.jsonl"), "--tags",
        &p(d, "missing.tsv"), "--out", &p(d, "intents.jsonl"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("label"));
}

#[test]
fn discover_with_bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = p(dir.path(), "bad.toml");
    std::fs::write(&cfg, "seed = 1\n[corpus]\ninputs = []\n[label]\ntags = \"t.tsv\"\n").unwrap();
    let out = forge(&["--config", &cfg, "discover", "--out", &p(dir.path(), "out")]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let out = forge(&["--config", &p(dir.path(), "nope.toml"), "discover", "--out", &p(dir.path(), "out")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_query_exits_with_two_and_points_at_the_error() {
    let graph = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/withdrawal/graph.jsonl");
    let out = forge(&["graph", "query", "--graph", graph.to_str().unwrap(), "--q", "MATCH (a:Intent RETURN a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('^'));
}
