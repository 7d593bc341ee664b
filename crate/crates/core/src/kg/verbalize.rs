use std::collections::BTreeMap;

use super::graph::Triple;

/// Relation templates with `{src}` and `{dst}` placeholders.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateTable {
    templates: BTreeMap<String, String>,
}

impl Default for TemplateTable {
    fn default() -> Self {
        let mut t = TemplateTable { templates: BTreeMap::new() };
        t.insert("RELATED_POLICY", "{src} is governed by {dst}.");
        t
    }
}

impl TemplateTable {
    pub fn empty() -> Self {
        TemplateTable { templates: BTreeMap::new() }
    }

    pub fn insert(&mut self, rel: &str, template: &str) {
        self.templates.insert(rel.to_string(), template.to_string());
    }

    pub fn get(&self, rel: &str) -> Option<&str> {
        self.templates.get(rel).map(String::as_str)
    }
}

pub fn display_name(name: &str) -> String {
    name.replace('_', " ")
}

/// One sentence for one triple.
pub fn verbalize_one(t: &Triple, table: &TemplateTable) -> String {
    let src = display_name(&t.src.name);
    match (&t.rel, &t.dst) {
        (Some(rel), Some(dst)) => {
            let dst = display_name(&dst.name);
            match table.get(rel) {
                Some(tpl) => tpl.replace("{src}", &src).replace("{dst}", &dst),
                None => format!("{src} {} {dst}.", rel.to_lowercase().replace('_', " ")),
            }
        }
        _ => format!("{src}."),
    }
}

/// Sentences for all triples joined by single spaces.
pub fn verbalize(triples: &[Triple], table: &TemplateTable) -> String {
    triples.iter().map(|t| verbalize_one(t, table)).collect::<Vec<_>>().join(" ")
}
