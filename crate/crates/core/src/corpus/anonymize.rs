use std::fmt;
use std::ops::Range;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiiKind {
    FullName,
    StudentId,
    PhoneNumber,
    Email,
}

impl PiiKind {
    /// The fixed replacement term for this kind.
    pub fn replacement(self) -> &'static str {
        match self {
            PiiKind::FullName => "[full_name]",
            PiiKind::StudentId => "[student_id]",
            PiiKind::PhoneNumber => "[phone_number]",
            PiiKind::Email => "[email]",
        }
    }

    fn digit_guarded(self) -> bool {
        matches!(self, PiiKind::StudentId | PiiKind::PhoneNumber)
    }
}

impl fmt::Display for PiiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.replacement().trim_matches(|c| c == '[' || c == ']'))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensorMethod {
    Regex,
    Tagger,
}

#[derive(Debug, thiserror::Error)]
pub enum AnonymizeError {
    #[error("a tagger-based censor rule is active but no tagger is available")]
    TaggerUnavailable,
    #[error("invalid censor pattern {pattern:?}: {source}")]
    BadPattern { pattern: String, source: regex::Error },
    #[error("replacement {0:?} is not one of the fixed replacement terms")]
    BadReplacement(String),
}

/// One censoring rule. Regex rules for digit identifiers only accept matches
/// that are not directly adjacent to another ASCII digit.
#[derive(Debug, Clone)]
pub struct CensorRule {
    pub kind: PiiKind,
    pub method: CensorMethod,
    pub pattern: String,
    pub replacement: String,
    compiled: Option<Regex>,
}

impl CensorRule {
    pub fn regex(kind: PiiKind, pattern: &str) -> Result<Self, AnonymizeError> {
        let compiled = Regex::new(pattern)
            .map_err(|source| AnonymizeError::BadPattern { pattern: pattern.to_string(), source })?;
        Ok(CensorRule {
            kind,
            method: CensorMethod::Regex,
            pattern: pattern.to_string(),
            replacement: kind.replacement().to_string(),
            compiled: Some(compiled),
        })
    }

    pub fn tagger(kind: PiiKind) -> Self {
        CensorRule {
            kind,
            method: CensorMethod::Tagger,
            pattern: String::new(),
            replacement: kind.replacement().to_string(),
            compiled: None,
        }
    }

    pub fn with_replacement(mut self, replacement: &str) -> Result<Self, AnonymizeError> {
        let valid = [PiiKind::FullName, PiiKind::StudentId, PiiKind::PhoneNumber, PiiKind::Email]
            .iter()
            .any(|k| k.replacement() == replacement);
        if !valid {
            return Err(AnonymizeError::BadReplacement(replacement.to_string()));
        }
        self.replacement = replacement.to_string();
        Ok(self)
    }

    /// Byte ranges in `text` accepted by this regex rule.
    pub fn find(&self, text: &str) -> Vec<Range<usize>> {
        let Some(re) = &self.compiled else { return Vec::new() };
        let bytes = text.as_bytes();
        re.find_iter(text)
            .filter(|m| {
                !self.kind.digit_guarded()
                    || !((m.start() > 0 && bytes[m.start() - 1].is_ascii_digit())
                        || (m.end() < bytes.len() && bytes[m.end()].is_ascii_digit()))
            })
            .map(|m| m.range())
            .collect()
    }
}

/// The default rule set in application order: phone numbers (10 digits) before
/// student ids (7 digits), then e-mail addresses, then tagger-found names.
pub fn default_rules(with_names: bool) -> Vec<CensorRule> {
    let mut rules = vec![
        CensorRule::regex(PiiKind::PhoneNumber, r"[0-9]{10}").expect("static pattern"),
        CensorRule::regex(PiiKind::StudentId, r"[0-9]{7}").expect("static pattern"),
        CensorRule::regex(PiiKind::Email, r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}")
            .expect("static pattern"),
    ];
    if with_names {
        rules.push(CensorRule::tagger(PiiKind::FullName));
    }
    rules
}

/// Finds person-name spans. Stands in for an NER model.
pub trait NameTagger: Send + Sync {
    fn person_spans(&self, text: &str) -> Vec<Range<usize>>;
}

/// Gazetteer tagger: case-insensitive matches of known full names, bounded
/// by non-letters so that adjacent digits do not hide a name.
#[derive(Debug, Clone, Default)]
pub struct GazetteerTagger {
    names: Vec<String>,
}

impl GazetteerTagger {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(names: I) -> Self {
        let mut names: Vec<String> = names
            .into_iter()
            .map(|n| n.as_ref().split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
            .filter(|n| !n.is_empty())
            .collect();
        // longest first so "Nguyễn Văn An" wins over "Văn An"
        names.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        names.dedup();
        GazetteerTagger { names }
    }

    pub fn parse(text: &str) -> Self {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
    }
}

impl NameTagger for GazetteerTagger {
    fn person_spans(&self, text: &str) -> Vec<Range<usize>> {
        // Lowercasing can change byte lengths, so match char by char on the
        // original string.
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut spans: Vec<Range<usize>> = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let boundary_before = i == 0 || !chars[i - 1].1.is_alphabetic();
            let mut advanced = false;
            if boundary_before {
                for name in &self.names {
                    if let Some(end_idx) = match_at(&chars, i, name) {
                        let boundary_after = end_idx == chars.len() || !chars[end_idx].1.is_alphabetic();
                        if boundary_after {
                            let end = chars.get(end_idx).map_or(text.len(), |c| c.0);
                            spans.push(chars[i].0..end);
                            i = end_idx;
                            advanced = true;
                            break;
                        }
                    }
                }
            }
            if !advanced {
                i += 1;
            }
        }
        spans
    }
}

fn match_at(chars: &[(usize, char)], start: usize, name: &str) -> Option<usize> {
    let mut idx = start;
    for nc in name.chars() {
        if nc == ' ' {
            // one or more whitespace characters in the text
            if idx >= chars.len() || !chars[idx].1.is_whitespace() {
                return None;
            }
            while idx < chars.len() && chars[idx].1.is_whitespace() {
                idx += 1;
            }
            continue;
        }
        let (_, tc) = *chars.get(idx)?;
        if !tc.to_lowercase().eq(nc.to_lowercase()) {
            return None;
        }
        idx += 1;
    }
    Some(idx)
}

/// A censored span: its kind and byte range in the input sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Redaction {
    pub kind: PiiKind,
    pub start: usize,
    pub end: usize,
}

/// Replaces every rule match with the rule's replacement term.
///
/// Candidates from all rules compete; the longer span wins, then the earlier
/// rule, so an e-mail address containing a digit run is censored as a whole.
/// The text on either side of a winner is rescanned on its own, which catches
/// shorter matches a losing candidate overlapped and makes the result a fixed
/// point: anonymizing the output again changes nothing.
pub fn anonymize(
    sentence: &str,
    rules: &[CensorRule],
    tagger: Option<&dyn NameTagger>,
) -> Result<(String, Vec<Redaction>), AnonymizeError> {
    if tagger.is_none() && rules.iter().any(|r| r.method == CensorMethod::Tagger) {
        return Err(AnonymizeError::TaggerUnavailable);
    }
    let mut chosen = Vec::new();
    resolve(sentence, 0..sentence.len(), rules, tagger, &mut chosen);
    chosen.sort_by_key(|(range, _)| range.start);

    let mut out = String::with_capacity(sentence.len());
    let mut redactions = Vec::with_capacity(chosen.len());
    let mut cursor = 0;
    for (range, rule) in chosen {
        out.push_str(&sentence[cursor..range.start]);
        out.push_str(&rules[rule].replacement);
        redactions.push(Redaction { kind: rules[rule].kind, start: range.start, end: range.end });
        cursor = range.end;
    }
    out.push_str(&sentence[cursor..]);
    Ok((out, redactions))
}

fn resolve(
    sentence: &str,
    window: Range<usize>,
    rules: &[CensorRule],
    tagger: Option<&dyn NameTagger>,
    chosen: &mut Vec<(Range<usize>, usize)>,
) {
    if window.is_empty() {
        return;
    }
    let text = &sentence[window.clone()];
    let mut best: Option<(Range<usize>, usize)> = None;
    for (idx, rule) in rules.iter().enumerate() {
        let ranges = match rule.method {
            CensorMethod::Regex => rule.find(text),
            CensorMethod::Tagger => tagger.map_or_else(Vec::new, |t| t.person_spans(text)),
        };
        for r in ranges.into_iter().filter(|r| !r.is_empty()) {
            let better = match &best {
                None => true,
                Some((b, bi)) => (r.len(), std::cmp::Reverse(idx), std::cmp::Reverse(r.start))
                    > (b.len(), std::cmp::Reverse(*bi), std::cmp::Reverse(b.start)),
            };
            if better {
                best = Some((r, idx));
            }
        }
    }
    if let Some((r, idx)) = best {
        let abs = window.start + r.start..window.start + r.end;
        resolve(sentence, window.start..abs.start, rules, tagger, chosen);
        resolve(sentence, abs.end..window.end, rules, tagger, chosen);
        chosen.push((abs, idx));
    }
}
