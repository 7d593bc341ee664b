use std::collections::HashSet;

/// Multi-syllable words to join with underscores.
///
/// Entries are stored lowercased with single spaces between syllables;
/// matching against a sentence is case-insensitive and leaves the original
/// characters in place.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashSet<String>,
    max_syllables: usize,
}

impl Lexicon {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        let mut lex = Lexicon::default();
        for w in words {
            lex.insert(w.as_ref());
        }
        lex
    }

    /// One word per line, syllables separated by spaces (or underscores).
    pub fn parse(text: &str) -> Self {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
    }

    pub fn insert(&mut self, word: &str) {
        let syllables: Vec<String> = word
            .split(|c: char| c.is_whitespace() || c == '_')
            .filter(|s| !s.is_empty())
            .map(str::to_lowercase)
            .collect();
        if syllables.len() < 2 {
            return;
        }
        self.max_syllables = self.max_syllables.max(syllables.len());
        self.entries.insert(syllables.join(" "));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn contains(&self, key: &str) -> bool {
        self.entries.contains(key)
    }
}

/// Joins every leftmost-longest lexicon match with `_`.
///
/// Syllables are maximal runs of alphanumeric characters; a multi-syllable
/// match requires the gaps between its syllables to be pure whitespace. Each
/// such gap is replaced by a single underscore.
pub fn segment_words(sentence: &str, lexicon: &Lexicon) -> String {
    if lexicon.is_empty() {
        return sentence.to_string();
    }
    let syllables = syllable_spans(sentence);
    let lowered: Vec<String> = syllables.iter().map(|&(s, e)| sentence[s..e].to_lowercase()).collect();
    let mut out = String::with_capacity(sentence.len() + 8);
    let mut cursor = 0usize;
    let mut i = 0usize;
    while i < syllables.len() {
        let mut matched = 0usize;
        let max = lexicon.max_syllables.min(syllables.len() - i);
        let mut key = lowered[i].clone();
        let mut candidate_len = 1;
        let mut keys = Vec::new();
        while candidate_len < max {
            let (_, prev_end) = syllables[i + candidate_len - 1];
            let (next_start, _) = syllables[i + candidate_len];
            let gap = &sentence[prev_end..next_start];
            if gap.is_empty() || !gap.chars().all(char::is_whitespace) {
                break;
            }
            key.push(' ');
            key.push_str(&lowered[i + candidate_len]);
            candidate_len += 1;
            keys.push((candidate_len, key.clone()));
        }
        for (len, k) in keys.iter().rev() {
            if lexicon.contains(k) {
                matched = *len;
                break;
            }
        }
        if matched >= 2 {
            let (start, _) = syllables[i];
            out.push_str(&sentence[cursor..start]);
            for (j, &(s, e)) in syllables.iter().enumerate().skip(i).take(matched) {
                out.push_str(&sentence[s..e]);
                if j + 1 < i + matched {
                    out.push('_');
                }
            }
            cursor = syllables[i + matched - 1].1;
            i += matched;
        } else {
            i += 1;
        }
    }
    out.push_str(&sentence[cursor..]);
    out
}

fn syllable_spans(s: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices() {
        if c.is_alphanumeric() {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(st) = start.take() {
            spans.push((st, i));
        }
    }
    if let Some(st) = start {
        spans.push((st, s.len()));
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex() -> Lexicon {
        Lexicon::new(["môn học", "khóa học", "đăng ký", "học phí", "học kỳ", "đăng ký môn học phần"])
    }

    #[test]
    fn joins_lexicon_words() {
        assert_eq!(segment_words("môn học", &lex()), "môn_học");
        assert_eq!(segment_words("khóa học", &lex()), "khóa_học");
        assert_eq!(segment_words("xin chào", &Lexicon::default()), "xin chào");
    }

    #[test]
    fn leftmost_longest_and_case_preserving() {
        assert_eq!(segment_words("Đăng ký môn học kỳ này.", &lex()), "Đăng_ký môn_học kỳ này.");
        assert_eq!(segment_words("đóng học phí, học kỳ 1", &lex()), "đóng học_phí, học_kỳ 1");
    }

    #[test]
    fn does_not_join_across_punctuation() {
        assert_eq!(segment_words("môn. học", &lex()), "môn. học");
        assert_eq!(segment_words("môn  học", &lex()), "môn_học");
    }

    #[test]
    fn single_syllable_entries_are_ignored() {
        assert!(Lexicon::new(["học"]).is_empty());
    }

    proptest! {
        #[test]
        fn non_space_characters_preserved(s in "(môn|học|khóa|phí|đăng|ký|x|,|\\.| |  )*") {
            let out = segment_words(&s, &lex());
            let mut a: Vec<char> = s.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
            let mut b: Vec<char> = out.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
            for tok in out.split_whitespace() {
                prop_assert!(!tok.contains(char::is_whitespace));
            }
        }
    }
}
