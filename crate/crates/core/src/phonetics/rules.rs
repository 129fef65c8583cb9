//! Ordered, context-sensitive grapheme-to-IPA rule tables.
//!
//! File format, one rule per line:
//!
//! ```text
//! grapheme<TAB>ipa symbols separated by spaces (empty = silent)[<TAB>left/right]
//! ```
//!
//! `#` starts a comment. Two directives declare the alphabet the table must
//! cover (`%alphabet`) and the letters the `V` context class matches
//! (`%vowels`). A context is a sequence of elements read outward from the
//! grapheme: `#` word edge, `V` vowel letter, `C` consonant letter, `[xyz]`
//! any of the listed characters, or a literal lower-case character.

use std::collections::BTreeSet;

use crate::lang::LanguageTag;

use super::PhoneticsError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Element {
    Edge,
    Vowel,
    Consonant,
    Set(Vec<char>),
    Literal(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Rule {
    grapheme: Vec<char>,
    ipa: Vec<String>,
    left: Vec<Element>,
    right: Vec<Element>,
}

/// A language's rule table, validated to cover its alphabet.
#[derive(Debug, Clone)]
pub struct G2PRuleSet {
    language: LanguageTag,
    rules: Vec<Rule>,
    vowels: BTreeSet<char>,
    alphabet: BTreeSet<char>,
    longest: usize,
}

fn parse_context(text: &str, line: usize) -> Result<Vec<Element>, PhoneticsError> {
    let mut out = Vec::new();
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        out.push(match c {
            '#' => Element::Edge,
            'V' => Element::Vowel,
            'C' => Element::Consonant,
            '[' => {
                let mut set = Vec::new();
                loop {
                    match chars.next() {
                        Some(']') => break,
                        Some(x) => set.push(x),
                        None => {
                            return Err(PhoneticsError::RuleSyntax {
                                line,
                                message: "unterminated `[` set".into(),
                            })
                        }
                    }
                }
                Element::Set(set)
            }
            other => Element::Literal(other),
        });
    }
    Ok(out)
}

impl G2PRuleSet {
    pub fn parse(language: LanguageTag, text: &str) -> Result<Self, PhoneticsError> {
        let mut rules = Vec::new();
        let mut vowels = BTreeSet::new();
        let mut alphabet = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            if let Some(rest) = raw.strip_prefix("%alphabet") {
                alphabet.extend(rest.trim().chars());
                continue;
            }
            if let Some(rest) = raw.strip_prefix("%vowels") {
                vowels.extend(rest.trim().chars());
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 || fields[0].is_empty() {
                return Err(PhoneticsError::RuleSyntax {
                    line,
                    message: "expected `grapheme<TAB>ipa[<TAB>left/right]`".into(),
                });
            }
            let (left, right) = match fields.get(2) {
                None => (Vec::new(), Vec::new()),
                Some(ctx) => {
                    let (l, r) = ctx.split_once('/').ok_or(PhoneticsError::RuleSyntax {
                        line,
                        message: "context must be `left/right`".into(),
                    })?;
                    (parse_context(l, line)?, parse_context(r, line)?)
                }
            };
            rules.push(Rule {
                grapheme: fields[0].chars().collect(),
                ipa: fields[1].split_whitespace().map(str::to_string).collect(),
                left,
                right,
            });
        }
        let longest = rules.iter().map(|r| r.grapheme.len()).max().unwrap_or(0);
        // longest grapheme first; the stable sort keeps file order within a length
        rules.sort_by_key(|r| std::cmp::Reverse(r.grapheme.len()));
        let set = G2PRuleSet {
            language,
            rules,
            vowels,
            alphabet,
            longest,
        };
        let missing = set.uncovered_letters();
        if !missing.is_empty() {
            return Err(PhoneticsError::IncompleteAlphabet {
                language,
                missing: missing.into_iter().collect(),
            });
        }
        Ok(set)
    }

    pub fn language(&self) -> LanguageTag {
        self.language
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    /// Alphabet letters that have no context-free single-letter rule.
    pub fn uncovered_letters(&self) -> Vec<char> {
        self.alphabet
            .iter()
            .copied()
            .filter(|&c| {
                !self
                    .rules
                    .iter()
                    .any(|r| r.grapheme == [c] && r.left.is_empty() && r.right.is_empty())
            })
            .collect()
    }

    fn is_vowel(&self, c: char) -> bool {
        self.vowels.contains(&c)
    }

    fn element_matches(&self, element: &Element, c: Option<char>) -> bool {
        match (element, c) {
            (Element::Edge, None) => true,
            (Element::Edge, Some(_)) | (_, None) => false,
            (Element::Vowel, Some(c)) => self.is_vowel(c),
            (Element::Consonant, Some(c)) => c.is_alphabetic() && !self.is_vowel(c),
            (Element::Set(set), Some(c)) => set.contains(&c),
            (Element::Literal(l), Some(c)) => *l == c,
        }
    }

    fn context_matches(&self, word: &[char], at: usize, rule: &Rule) -> bool {
        // left context is written in reading order and ends next to the grapheme
        let mut pos = at;
        for element in rule.left.iter().rev() {
            let c = pos.checked_sub(1).map(|p| word[p]);
            if !self.element_matches(element, c) {
                return false;
            }
            if element == &Element::Edge {
                break;
            }
            pos -= 1;
        }
        for (pos, element) in (at + rule.grapheme.len()..).zip(&rule.right) {
            let c = word.get(pos).copied();
            if !self.element_matches(element, c) {
                return false;
            }
            if element == &Element::Edge {
                break;
            }
        }
        true
    }

    /// Transcribes one word (lower-cased letters, no spaces). Returns the
    /// symbols and the number of characters no rule could consume.
    pub(crate) fn transcribe_word(&self, word: &[char], out: &mut Vec<String>) -> usize {
        let mut dropped = 0;
        let mut i = 0;
        while i < word.len() {
            let max = self.longest.min(word.len() - i);
            let hit = self.rules.iter().find(|r| {
                r.grapheme.len() <= max
                    && word[i..i + r.grapheme.len()] == r.grapheme[..]
                    && self.context_matches(word, i, r)
            });
            match hit {
                Some(rule) => {
                    out.extend(rule.ipa.iter().cloned());
                    i += rule.grapheme.len();
                }
                None => {
                    dropped += 1;
                    i += 1;
                }
            }
        }
        dropped
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "%alphabet ab\n%vowels a\nab\tX\t#/\na\tA\nb\t\tV/#\nb\tB\n";

    fn run(set: &G2PRuleSet, word: &str) -> (Vec<String>, usize) {
        let w: Vec<char> = word.chars().collect();
        let mut out = Vec::new();
        let dropped = set.transcribe_word(&w, &mut out);
        (out, dropped)
    }

    #[test]
    fn longest_match_then_file_order() {
        let set = G2PRuleSet::parse(LanguageTag::En, MINI).unwrap();
        assert_eq!(run(&set, "ab").0, vec!["X"]);
        // "ab" is only word-initial; a final b after a vowel is silent
        assert_eq!(run(&set, "bab").0, vec!["B", "A"]);
        assert_eq!(run(&set, "bba").0, vec!["B", "B", "A"]);
    }

    #[test]
    fn context_classes() {
        let text = "%alphabet abc\n%vowels a\na\tA\nb\tV\tV/\nb\tC\tC/\nb\tB\nc\tK\n";
        let set = G2PRuleSet::parse(LanguageTag::En, text).unwrap();
        assert_eq!(run(&set, "ab").0, vec!["A", "V"]);
        assert_eq!(run(&set, "cb").0, vec!["K", "C"]);
        assert_eq!(run(&set, "b").0, vec!["B"]);
    }

    #[test]
    fn unknown_letters_are_dropped_and_counted() {
        let set = G2PRuleSet::parse(LanguageTag::En, MINI).unwrap();
        assert_eq!(run(&set, "aza"), (vec!["A".to_string(), "A".to_string()], 1));
    }

    #[test]
    fn incomplete_alphabet_is_rejected() {
        let err = G2PRuleSet::parse(LanguageTag::En, "%alphabet abc\na\tA\nb\tB\tV/\n").unwrap_err();
        match err {
            PhoneticsError::IncompleteAlphabet { missing, .. } => assert_eq!(missing, vec!['b', 'c']),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = G2PRuleSet::parse(LanguageTag::En, "a\tA\nbroken\n").unwrap_err();
        assert!(matches!(err, PhoneticsError::RuleSyntax { line: 2, .. }));
        assert!(G2PRuleSet::parse(LanguageTag::En, "a\tA\t[ab/\n").is_err());
    }
}
