//! Grapheme-to-IPA transcription and phonetic edit distance.
//!
//! The distance between two lines is the Levenshtein distance between their
//! IPA symbol sequences. Symbols, not code points, are the edit unit, so an
//! affricate such as `tʃ` or a nasal vowel such as `ɑ̃` costs one edit.

mod distance;
mod rules;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::lang::LanguageTag;
use crate::syllable::hangul;
use crate::syllable::kana::to_hiragana;

pub use distance::levenshtein;
pub use rules::G2PRuleSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhoneticsError {
    #[error("no transcription rules loaded for {0}")]
    MissingRules(LanguageTag),
    #[error("rule set is for {found}, expected {expected}")]
    LanguageMismatch {
        expected: LanguageTag,
        found: LanguageTag,
    },
    #[error("rule table line {line}: {message}")]
    RuleSyntax { line: usize, message: String },
    #[error("{language} rule table leaves letters without a default rule: {missing:?}")]
    IncompleteAlphabet {
        language: LanguageTag,
        missing: Vec<char>,
    },
    #[error("invalid IPA symbol {0:?}")]
    InvalidSymbol(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// A sequence of IPA symbols. Multi-character symbols are single elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct IpaString {
    symbols: Vec<String>,
}

impl IpaString {
    pub fn new(symbols: Vec<String>) -> Result<Self, PhoneticsError> {
        if let Some(bad) = symbols
            .iter()
            .find(|s| s.is_empty() || s.chars().any(char::is_whitespace))
        {
            return Err(PhoneticsError::InvalidSymbol(bad.clone()));
        }
        Ok(Self { symbols })
    }

    /// Parses space-separated symbols, e.g. `"k a s a"`.
    pub fn parse(text: &str) -> Self {
        Self {
            symbols: text.split_whitespace().map(str::to_string).collect(),
        }
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl TryFrom<Vec<String>> for IpaString {
    type Error = PhoneticsError;

    fn try_from(symbols: Vec<String>) -> Result<Self, Self::Error> {
        Self::new(symbols)
    }
}

impl From<IpaString> for Vec<String> {
    fn from(ipa: IpaString) -> Self {
        ipa.symbols
    }
}

impl fmt::Display for IpaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}/", self.symbols.join(" "))
    }
}

/// Output of [`transcribe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcription {
    pub ipa: IpaString,
    /// Letters for which no rule matched; they contribute no symbols.
    pub dropped: usize,
}

/// Transcribes normalized text with `rules`.
pub fn transcribe(
    lang: LanguageTag,
    text: &str,
    rules: &G2PRuleSet,
) -> Result<Transcription, PhoneticsError> {
    if rules.language() != lang {
        return Err(PhoneticsError::LanguageMismatch {
            expected: lang,
            found: rules.language(),
        });
    }
    let prepared = prepare(lang, text);
    let mut symbols = Vec::new();
    let mut dropped = 0;
    let mut word = Vec::new();
    for c in prepared.chars().chain(std::iter::once(' ')) {
        if c.is_alphabetic() || ('\u{300}'..='\u{36f}').contains(&c) {
            word.push(c);
        } else if !word.is_empty() {
            dropped += rules.transcribe_word(&word, &mut symbols);
            word.clear();
        }
    }
    if dropped > 0 {
        log::warn!("{lang}: {dropped} character(s) without a transcription rule were dropped");
    }
    Ok(Transcription {
        ipa: IpaString { symbols },
        dropped,
    })
}

fn prepare(lang: LanguageTag, text: &str) -> String {
    let lowered = text.to_lowercase();
    match lang {
        LanguageTag::Ko => lowered.chars().flat_map(decompose_hangul).collect(),
        LanguageTag::Ja => lowered.chars().map(to_hiragana).collect(),
        _ => lowered,
    }
}

/// Splits a precomposed Hangul block into conjoining jamo.
pub fn decompose_hangul(c: char) -> Vec<char> {
    if !hangul::is_syllable_block(c) {
        return vec![c];
    }
    let index = c as u32 - hangul::SYLLABLE_FIRST as u32;
    let (initial, medial, fin) = (index / (21 * 28), (index % (21 * 28)) / 28, index % 28);
    let mut out = vec![
        char::from_u32(0x1100 + initial).expect("valid initial jamo"),
        char::from_u32(0x1161 + medial).expect("valid medial jamo"),
    ];
    if fin > 0 {
        out.push(char::from_u32(0x11A7 + fin).expect("valid final jamo"));
    }
    out
}

/// Edit distance between two transcriptions.
pub fn edit_distance(a: &IpaString, b: &IpaString) -> usize {
    levenshtein(&a.symbols, &b.symbols)
}

/// Rule tables keyed by language.
#[derive(Debug, Clone, Default)]
pub struct RuleBook {
    sets: HashMap<LanguageTag, G2PRuleSet>,
}

const BUILTIN: [(LanguageTag, &str); 5] = [
    (LanguageTag::En, include_str!("../../assets/g2p/en.tsv")),
    (LanguageTag::Es, include_str!("../../assets/g2p/es.tsv")),
    (LanguageTag::Fr, include_str!("../../assets/g2p/fr.tsv")),
    (LanguageTag::Ko, include_str!("../../assets/g2p/ko.tsv")),
    (LanguageTag::Ja, include_str!("../../assets/g2p/ja.tsv")),
];

impl RuleBook {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The broad-phonemic tables shipped with the crate.
    pub fn builtin() -> Self {
        let mut book = Self::empty();
        for (lang, text) in BUILTIN {
            book.insert(G2PRuleSet::parse(lang, text).expect("builtin rule table is valid"));
        }
        book
    }

    pub fn shared() -> &'static RuleBook {
        static SHARED: std::sync::OnceLock<RuleBook> = std::sync::OnceLock::new();
        SHARED.get_or_init(RuleBook::builtin)
    }

    pub fn insert(&mut self, set: G2PRuleSet) {
        self.sets.insert(set.language(), set);
    }

    /// Replaces tables with `<code>.tsv` files found in `dir`.
    pub fn with_dir(mut self, dir: &Path) -> Result<Self, PhoneticsError> {
        for lang in LanguageTag::ALL {
            let path = dir.join(format!("{}.tsv", lang.code().to_lowercase()));
            if path.exists() {
                let text = std::fs::read_to_string(&path).map_err(|e| PhoneticsError::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                self.insert(G2PRuleSet::parse(lang, &text)?);
            }
        }
        Ok(self)
    }

    pub fn get(&self, lang: LanguageTag) -> Result<&G2PRuleSet, PhoneticsError> {
        self.sets.get(&lang).ok_or(PhoneticsError::MissingRules(lang))
    }

    pub fn transcribe(&self, lang: LanguageTag, text: &str) -> Result<Transcription, PhoneticsError> {
        transcribe(lang, text, self.get(lang)?)
    }
}

/// Levenshtein distance between the IPA transcriptions of two lines.
pub fn phonetic_distance(
    lang_gt: LanguageTag,
    gt: &str,
    lang_pred: LanguageTag,
    pred: &str,
    rules: &RuleBook,
) -> Result<usize, PhoneticsError> {
    let a = rules.transcribe(lang_gt, gt)?;
    let b = rules.transcribe(lang_pred, pred)?;
    Ok(edit_distance(&a.ipa, &b.ipa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use LanguageTag::*;

    fn ipa(lang: LanguageTag, text: &str) -> String {
        RuleBook::shared().transcribe(lang, text).unwrap().ipa.symbols().join(" ")
    }

    #[test]
    fn shipped_tables_cover_their_alphabets() {
        let book = RuleBook::builtin();
        for lang in LanguageTag::ALL {
            let set = book.get(lang).unwrap();
            assert!(set.uncovered_letters().is_empty(), "{lang}");
            assert!(!set.alphabet().is_empty(), "{lang}");
        }
    }

    #[test]
    fn reference_transcriptions() {
        assert_eq!(ipa(Es, "casa"), "k a s a");
        assert_eq!(ipa(Ko, "나"), "n a");
        assert_eq!(ipa(En, "go"), "ɡ oʊ");
        assert_eq!(ipa(En, "no"), "n oʊ");
        assert_eq!(ipa(Ja, "なび"), "n a b i");
        assert_eq!(ipa(Ja, "キャ"), "kʲ a");
        assert_eq!(ipa(Fr, "chanson"), "ʃ ɑ̃ s ɔ̃");
        assert_eq!(ipa(Ko, "날"), "n a l");
        assert_eq!(ipa(Es, "tierra"), "t j e r a");
    }

    #[test]
    fn empty_text_is_empty_ipa() {
        assert!(RuleBook::shared().transcribe(En, "").unwrap().ipa.is_empty());
        assert!(RuleBook::shared().transcribe(Ko, " ,. ").unwrap().ipa.is_empty());
    }

    #[test]
    fn unknown_characters_are_counted() {
        let t = RuleBook::shared().transcribe(Ja, "夢なび").unwrap();
        assert_eq!(t.dropped, 1);
        assert_eq!(t.ipa.len(), 4);
    }

    #[test]
    fn missing_rules_error() {
        let book = RuleBook::empty();
        assert_eq!(book.transcribe(En, "go").unwrap_err(), PhoneticsError::MissingRules(En));
        let es = G2PRuleSet::parse(Es, include_str!("../../assets/g2p/es.tsv")).unwrap();
        assert!(matches!(transcribe(En, "go", &es), Err(PhoneticsError::LanguageMismatch { .. })));
    }

    #[test]
    fn phonetic_distance_examples() {
        let book = RuleBook::shared();
        assert_eq!(phonetic_distance(En, "go", En, "no", book).unwrap(), 1);
        assert_eq!(phonetic_distance(Ko, "나비가", Ko, "나비가", book).unwrap(), 0);
    }

    #[test]
    fn hangul_decomposition() {
        assert_eq!(decompose_hangul('나'), vec!['\u{1102}', '\u{1161}']);
        assert_eq!(decompose_hangul('날'), vec!['\u{1102}', '\u{1161}', '\u{11AF}']);
        assert_eq!(decompose_hangul('a'), vec!['a']);
    }

    #[test]
    fn ipa_string_rejects_blank_symbols() {
        assert!(IpaString::new(vec!["a".into(), "".into()]).is_err());
        assert!(IpaString::new(vec!["a b".into()]).is_err());
        assert_eq!(IpaString::parse(" k  a ").len(), 2);
    }
}
