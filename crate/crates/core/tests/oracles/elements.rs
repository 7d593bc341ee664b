//! Golden element fixtures and random dependency trees.

use std::fs;

use forge_core::label::SentenceElements;
use forge_core::TaggedToken;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::fixture_path;

pub struct Case {
    pub text: String,
    pub tokens: Vec<TaggedToken>,
    pub expected: SentenceElements,
}

pub fn golden() -> Vec<Case> {
    let text = fs::read_to_string(fixture_path("elements/golden.tsv")).unwrap();
    let mut cases = Vec::new();
    for block in text.split("\n\n").filter(|b| b.contains('\t')) {
        let mut c = Case { text: String::new(), tokens: vec![], expected: SentenceElements::default() };
        for line in block.lines() {
            if let Some(h) = line.strip_prefix("# ") {
                let (k, v) = h.split_once(" =").unwrap();
                let forms: Vec<String> = v.split_whitespace().map(String::from).collect();
                match k {
                    "text" => c.text = v.trim().to_string(),
                    "verbs" => c.expected.verbs = forms,
                    "direct_objects" => c.expected.direct_objects = forms,
                    "verb_modifiers" => c.expected.verb_modifiers = forms,
                    "others" => c.expected.others = forms,
                    _ => panic!("unknown header {k}"),
                }
            } else {
                let f: Vec<&str> = line.split('\t').collect();
                c.tokens.push(TaggedToken { form: f[0].into(), pos: f[1].into(), head: f[2].parse().unwrap(), deprel: f[3].into() });
            }
        }
        cases.push(c);
    }
    cases
}

const DEPRELS: [&str; 12] = ["sub", "dob", "vmod", "prp", "pob", "nmod", "det", "coord", "conj", "adv", "loc", "tmp"];

/// Random tree: one root, every other token hangs off an earlier-built node.
pub fn random_tree(rng: &mut ChaCha8Rng) -> Vec<TaggedToken> {
    let n = rng.random_range(1..=20usize);
    let mut order: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut head = vec![0usize; n + 1];
    for (k, &p) in order.iter().enumerate().skip(1) {
        head[p] = order[rng.random_range(0..k)];
    }
    (1..=n)
        .map(|p| {
            let deprel = if head[p] == 0 { "root" } else { DEPRELS.choose(rng).unwrap() };
            TaggedToken { form: format!("w{p}"), pos: "X".into(), head: head[p], deprel: deprel.into() }
        })
        .collect()
}
