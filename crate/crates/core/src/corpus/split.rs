use std::collections::HashSet;

const TERMINALS: [char; 4] = ['.', '!', '?', '…'];
const CLOSERS: [char; 6] = ['"', '\'', ')', ']', '”', '’'];

/// Tokens ending in a period that must not end a sentence.
#[derive(Debug, Clone, Default)]
pub struct Abbreviations(HashSet<String>);

impl Abbreviations {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(items: I) -> Self {
        Abbreviations(items.into_iter().map(Into::into).collect())
    }

    /// A small default list of Vietnamese academic titles and common forms.
    pub fn vietnamese() -> Self {
        Self::new(["TS.", "ThS.", "PGS.", "GS.", "KS.", "CN.", "TP.", "Q.", "P.", "v.v.", "e.g.", "i.e."])
    }

    /// One abbreviation per line; blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        )
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }
}

/// Splits `text` into trimmed sentences.
///
/// A sentence ends at a newline, or at a run of terminal punctuation
/// (optionally followed by closing quotes or brackets) that is followed by
/// whitespace or the end of input. A period ending a listed abbreviation does
/// not end a sentence.
pub fn split_sentences(text: &str, abbreviations: &Abbreviations) -> Vec<String> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '\n' {
            push_trimmed(&mut out, &text[start..pos]);
            start = pos + c.len_utf8();
            i += 1;
            continue;
        }
        if TERMINALS.contains(&c) {
            let mut j = i;
            while j + 1 < chars.len() && TERMINALS.contains(&chars[j + 1].1) {
                j += 1;
            }
            while j + 1 < chars.len() && CLOSERS.contains(&chars[j + 1].1) {
                j += 1;
            }
            let end = chars[j].0 + chars[j].1.len_utf8();
            let at_boundary = j + 1 == chars.len() || chars[j + 1].1.is_whitespace();
            if at_boundary && !(c == '.' && j == i && ends_with_abbreviation(&text[start..end], abbreviations)) {
                push_trimmed(&mut out, &text[start..end]);
                start = end;
            }
            i = j + 1;
            continue;
        }
        i += 1;
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn ends_with_abbreviation(fragment: &str, abbreviations: &Abbreviations) -> bool {
    fragment.split_whitespace().last().is_some_and(|tok| abbreviations.contains(tok))
}

fn push_trimmed(out: &mut Vec<String>, fragment: &str) {
    let t = fragment.trim();
    if !t.is_empty() {
        out.push(t.to_string());
    }
}

/// Sentence-level noise filter applied during ingestion.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseFilter {
    pub min_tokens: usize,
    /// Minimum share of alphabetic characters among non-whitespace characters.
    pub min_alpha_ratio: f64,
}

impl Default for NoiseFilter {
    fn default() -> Self {
        NoiseFilter { min_tokens: 2, min_alpha_ratio: 0.4 }
    }
}

impl NoiseFilter {
    pub fn keep(&self, sentence: &str) -> bool {
        if sentence.split_whitespace().count() < self.min_tokens {
            return false;
        }
        let (mut alpha, mut total) = (0usize, 0usize);
        for c in sentence.chars().filter(|c| !c.is_whitespace()) {
            total += 1;
            if c.is_alphabetic() {
                alpha += 1;
            }
        }
        total > 0 && alpha as f64 >= self.min_alpha_ratio * total as f64
    }
}
