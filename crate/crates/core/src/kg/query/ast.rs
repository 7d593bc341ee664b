use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePattern {
    pub var: String,
    pub label: Option<String>,
    pub props: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePattern {
    pub rel: String,
}

/// `MATCH (a)[-[:R]->(b)] RETURN vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub start: NodePattern,
    pub hop: Option<(EdgePattern, NodePattern)>,
    pub returns: Vec<String>,
}

impl Query {
    pub fn bound_vars(&self) -> Vec<&str> {
        let mut v = vec![self.start.var.as_str()];
        if let Some((_, n)) = &self.hop {
            v.push(&n.var);
        }
        v
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.var)?;
        if let Some(l) = &self.label {
            write!(f, ":{l}")?;
        }
        if !self.props.is_empty() {
            let props: Vec<String> = self.props.iter().map(|(k, v)| format!("{k}: {}", quote(v))).collect();
            write!(f, " {{{}}}", props.join(", "))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MATCH {}", self.start)?;
        if let Some((e, n)) = &self.hop {
            write!(f, "-[:{}]->{}", e.rel, n)?;
        }
        write!(f, " RETURN {}", self.returns.join(", "))
    }
}
