use std::fs;
use std::path::Path;

use super::RagError;

pub const ANSWER_TEMPLATE_V1: &str = include_str!("../../templates/answer_prompt.v1.txt");
pub const QUERY_TEMPLATE_V1: &str = include_str!("../../templates/query_prompt.v1.txt");

/// Substitutes `{name}` placeholders in one pass, so substituted text is
/// never rescanned. Unknown placeholders are left as written.
pub fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after.find('}').and_then(|close| {
            let name = &after[..close];
            vars.iter().find(|(k, _)| *k == name).map(|(_, v)| (close, *v))
        });
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplates {
    pub answer: String,
    pub query: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates { answer: ANSWER_TEMPLATE_V1.to_string(), query: QUERY_TEMPLATE_V1.to_string() }
    }
}

impl PromptTemplates {
    /// Reads `answer_prompt.v1.txt` and `query_prompt.v1.txt` from `dir`.
    pub fn load(dir: &Path) -> Result<Self, RagError> {
        let read = |name: &str| {
            let p = dir.join(name);
            fs::read_to_string(&p).map_err(|e| RagError::Template(format!("{}: {e}", p.display())))
        };
        let t = PromptTemplates { answer: read("answer_prompt.v1.txt")?, query: read("query_prompt.v1.txt")? };
        for (name, tpl, keys) in [("answer", &t.answer, ["{facts}", "{question}"]), ("query", &t.query, ["{question}", "{question}"])] {
            if let Some(k) = keys.iter().find(|k| !tpl.contains(*k)) {
                return Err(RagError::Template(format!("{name} template lacks {k}")));
            }
        }
        Ok(t)
    }

    pub fn answer_prompt(&self, facts: &str, question: &str) -> String {
        fill(&self.answer, &[("facts", facts), ("question", question)])
    }

    pub fn query_prompt(&self, question: &str, labels: &str, relations: &str) -> String {
        fill(&self.query, &[("question", question), ("labels", labels), ("relations", relations)])
    }
}
