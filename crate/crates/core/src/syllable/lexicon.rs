//! Exception lexicons: `word<TAB>count` or `word<TAB>syl1|syl2|...` per line.

use std::collections::HashMap;
use std::path::Path;

use super::SyllableError;

/// What the lexicon knows about a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconEntry {
    Count(usize),
    /// Lower-cased syllables; their concatenation is the word.
    Syllables(Vec<String>),
}

impl LexiconEntry {
    pub fn count(&self) -> usize {
        match self {
            LexiconEntry::Count(n) => *n,
            LexiconEntry::Syllables(s) => s.len(),
        }
    }
}

/// Word-level overrides consulted before any rule-based counting.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, LexiconEntry>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, SyllableError> {
        let mut lexicon = Lexicon::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |why: &str| SyllableError::Lexicon {
                line: lineno + 1,
                message: why.to_string(),
            };
            let (word, value) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected `word<TAB>value`"))?;
            let word = word.trim().to_lowercase();
            let value = value.trim();
            if word.is_empty() || value.is_empty() {
                return Err(bad("empty word or value"));
            }
            let entry = if let Ok(n) = value.parse::<usize>() {
                if n == 0 {
                    return Err(bad("syllable count must be at least 1"));
                }
                if n > word.chars().filter(|c| c.is_alphabetic()).count() {
                    return Err(bad("more syllables than letters"));
                }
                LexiconEntry::Count(n)
            } else {
                let syllables: Vec<String> =
                    value.split('|').map(|s| s.trim().to_lowercase()).collect();
                if syllables.iter().any(|s| s.is_empty()) {
                    return Err(bad("empty syllable"));
                }
                if syllables.concat() != word {
                    return Err(bad("syllables do not spell the word"));
                }
                LexiconEntry::Syllables(syllables)
            };
            lexicon.entries.insert(word, entry);
        }
        Ok(lexicon)
    }

    pub fn load(path: &Path) -> Result<Self, SyllableError> {
        let text = std::fs::read_to_string(path).map_err(|e| SyllableError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, word: &str, entry: LexiconEntry) {
        self.entries.insert(word.to_lowercase(), entry);
    }

    /// Merges `other` into `self`; entries in `other` win.
    pub fn extend(&mut self, other: Lexicon) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
