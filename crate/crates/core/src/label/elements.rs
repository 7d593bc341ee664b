use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{LabelError, TaggedToken};

/// Dependency relations followed when growing the relevant-position set,
/// and relations whose tokens are kept as auxiliary elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementConfig {
    pub closure_deprels: Vec<String>,
    pub aux_deprels: Vec<String>,
}

impl Default for ElementConfig {
    fn default() -> Self {
        let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect();
        ElementConfig {
            closure_deprels: s(&["dob", "vmod", "prp", "pob", "nmod", "det", "coord", "conj"]),
            aux_deprels: s(&["nmod", "pob", "det"]),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceElements {
    pub verbs: Vec<String>,
    pub direct_objects: Vec<String>,
    pub verb_modifiers: Vec<String>,
    pub others: Vec<String>,
}

impl SentenceElements {
    pub fn is_empty(&self) -> bool {
        self.verbs.is_empty() && self.direct_objects.is_empty() && self.verb_modifiers.is_empty() && self.others.is_empty()
    }
}

fn root_position(tokens: &[TaggedToken]) -> Result<usize, LabelError> {
    let n = tokens.len();
    let mut root = None;
    for (i, t) in tokens.iter().enumerate() {
        if t.head > n {
            return Err(LabelError::InvalidHead { position: i + 1, head: t.head });
        }
        if t.deprel == "root" {
            if root.is_some() {
                return Err(LabelError::MultipleRoots);
            }
            root = Some(i + 1);
        }
    }
    root.ok_or(LabelError::NoRoot)
}

/// Grows `set` to the fixed point of "head in set and deprel in closure list".
pub fn relevant_positions(tokens: &[TaggedToken], seed: BTreeSet<usize>, cfg: &ElementConfig) -> BTreeSet<usize> {
    let mut set = seed;
    loop {
        let before = set.len();
        for (i, t) in tokens.iter().enumerate() {
            if set.contains(&t.head) && cfg.closure_deprels.contains(&t.deprel) {
                set.insert(i + 1);
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// Collects verbs, objects, verb modifiers and auxiliary tokens from one
/// dependency-parsed sentence. Positions are 1-based; head 0 is the root.
pub fn extract_sentence_elements(tokens: &[TaggedToken], cfg: &ElementConfig) -> Result<SentenceElements, LabelError> {
    let root = root_position(tokens)?;
    let set = relevant_positions(tokens, BTreeSet::from([root]), cfg);
    let pos_of = |rel: &str| -> BTreeSet<usize> {
        tokens.iter().enumerate().filter(|(_, t)| t.deprel == rel).map(|(i, _)| i + 1).collect()
    };
    let prp = pos_of("prp");
    let vmod = pos_of("vmod");
    let dob = pos_of("dob");
    let mut out = SentenceElements::default();
    for (i, t) in tokens.iter().enumerate() {
        let p = i + 1;
        let form = || t.form.clone();
        let mut other = false;
        if p == root {
            out.verbs.push(form());
        }
        match t.deprel.as_str() {
            "dob" => out.direct_objects.push(form()),
            "prp" if set.contains(&p) => out.direct_objects.push(form()),
            "vmod" if t.head == root || prp.contains(&t.head) || vmod.contains(&t.head) => out.verb_modifiers.push(form()),
            "nmod" if dob.contains(&t.head) => other = true,
            _ => {}
        }
        if (set.contains(&p) || set.contains(&t.head)) && cfg.aux_deprels.contains(&t.deprel) {
            other = true;
        }
        if other {
            out.others.push(form());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn tok(form: &str, pos: &str, head: usize, deprel: &str) -> TaggedToken {
        TaggedToken { form: form.into(), pos: pos.into(), head, deprel: deprel.into() }
    }

    #[test]
    fn register_course_trace() {
        let s = [tok("em", "P", 2, "sub"), tok("muốn", "V", 0, "root"), tok("đăng_ký", "V", 2, "vmod"), tok("môn_học", "N", 3, "dob")];
        let e = extract_sentence_elements(&s, &ElementConfig::default()).unwrap();
        assert_eq!(e.verbs, vec!["muốn"]);
        assert_eq!(e.verb_modifiers, vec!["đăng_ký"]);
        assert_eq!(e.direct_objects, vec!["môn_học"]);
        assert!(e.others.is_empty());
    }

    #[test]
    fn noun_modifier_of_object_is_other() {
        let s = [tok("hủy", "V", 0, "root"), tok("lớp", "N", 1, "dob"), tok("này", "P", 2, "nmod")];
        let e = extract_sentence_elements(&s, &ElementConfig::default()).unwrap();
        assert_eq!(e.others, vec!["này"]);
    }

    #[test]
    fn preposition_in_set_counts_as_object() {
        let s = [tok("hỏi", "V", 0, "root"), tok("về", "E", 1, "prp"), tok("học_phí", "N", 2, "pob"), tok("nộp", "V", 2, "vmod")];
        let e = extract_sentence_elements(&s, &ElementConfig::default()).unwrap();
        assert_eq!(e.direct_objects, vec!["về"]);
        assert_eq!(e.verb_modifiers, vec!["nộp"]);
        assert_eq!(e.others, vec!["học_phí"]);
    }

    #[test]
    fn root_errors() {
        let cfg = ElementConfig::default();
        assert!(matches!(extract_sentence_elements(&[tok("a", "N", 0, "sub")], &cfg), Err(LabelError::NoRoot)));
        let two = [tok("a", "V", 0, "root"), tok("b", "V", 0, "root")];
        assert!(matches!(extract_sentence_elements(&two, &cfg), Err(LabelError::MultipleRoots)));
        let bad = [tok("a", "V", 0, "root"), tok("b", "N", 5, "dob")];
        assert!(matches!(extract_sentence_elements(&bad, &cfg), Err(LabelError::InvalidHead { position: 2, head: 5 })));
    }

    const RELS: [&str; 9] = ["root", "sub", "dob", "vmod", "prp", "pob", "nmod", "det", "punct"];

    fn sentence() -> impl Strategy<Value = Vec<TaggedToken>> {
        (1usize..10).prop_flat_map(|n| {
            (0..n, prop::collection::vec((0..=n, 1usize..RELS.len()), n)).prop_map(move |(root, raw)| {
                raw.into_iter()
                    .enumerate()
                    .map(|(i, (head, rel))| {
                        if i == root {
                            tok(&format!("w{i}"), "X", 0, "root")
                        } else {
                            tok(&format!("w{i}"), "X", head, RELS[rel])
                        }
                    })
                    .collect()
            })
        })
    }

    proptest! {
        #[test]
        fn forms_come_from_sentence(s in sentence()) {
            let e = extract_sentence_elements(&s, &ElementConfig::default()).unwrap();
            let forms: Vec<&String> = s.iter().map(|t| &t.form).collect();
            for f in e.verbs.iter().chain(&e.direct_objects).chain(&e.verb_modifiers).chain(&e.others) {
                prop_assert!(forms.contains(&f));
            }
        }

        #[test]
        fn closure_is_fixed_point(s in sentence()) {
            let cfg = ElementConfig::default();
            let root = s.iter().position(|t| t.deprel == "root").unwrap() + 1;
            let once = relevant_positions(&s, BTreeSet::from([root]), &cfg);
            let twice = relevant_positions(&s, once.clone(), &cfg);
            prop_assert_eq!(once, twice);
        }
    }
}
