//! Text normalization, syllable segmentation and syllable counting.
//!
//! Every syllable count used by the metrics and the translation pipeline
//! comes from here. English, Spanish and French use rule-based nucleus
//! detection backed by exception lexicons; Korean counts Hangul blocks;
//! Japanese counts morae over kana.

mod english;
mod french;
pub mod hangul;
pub mod kana;
mod latin;
pub mod lexicon;
mod numbers;
mod spanish;

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::lang::LanguageTag;

pub use kana::{LexiconReadings, ReadingProvider};
pub use lexicon::{Lexicon, LexiconEntry};
pub use numbers::{expand_number, MAX_MAGNITUDE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyllableError {
    #[error("number {0} is outside the supported range (|n| <= 999,999)")]
    UnsupportedNumber(String),
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrenchFinalE {
    /// Word-final e / es / verbal ent are silent, as in speech.
    #[default]
    Mute,
    /// Final schwas are realised, as often happens in sung French.
    Sounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationPolicy {
    pub expand_numbers: bool,
    pub strip_punctuation_for_counting: bool,
    pub french_final_e_mode: FrenchFinalE,
}

impl Default for NormalizationPolicy {
    fn default() -> Self {
        Self {
            expand_numbers: true,
            strip_punctuation_for_counting: true,
            french_final_e_mode: FrenchFinalE::Mute,
        }
    }
}

/// Ordered syllable (or mora) units of a line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyllableSegmentation {
    pub units: Vec<String>,
    pub count: usize,
    pub language: LanguageTag,
}

/// Holds the per-language lexicons and the Japanese reading provider.
#[derive(Clone)]
pub struct Syllabifier {
    lexicons: HashMap<LanguageTag, Lexicon>,
    readings: Arc<dyn ReadingProvider>,
}

impl std::fmt::Debug for Syllabifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Syllabifier")
            .field("lexicons", &self.lexicons.iter().map(|(k, v)| (k, v.len())).collect::<Vec<_>>())
            .finish_non_exhaustive()
    }
}

const BUILTIN_EN: &str = include_str!("../../assets/lexicon/en.tsv");
const BUILTIN_ES: &str = include_str!("../../assets/lexicon/es.tsv");
const BUILTIN_FR: &str = include_str!("../../assets/lexicon/fr.tsv");
const BUILTIN_JA_READINGS: &str = include_str!("../../assets/lexicon/ja_readings.tsv");

impl Default for Syllabifier {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Syllabifier {
    /// No lexicons at all: pure rules.
    pub fn rules_only() -> Self {
        Self {
            lexicons: HashMap::new(),
            readings: Arc::new(LexiconReadings::default()),
        }
    }

    /// Rules plus the lexicons shipped with the crate.
    pub fn builtin() -> Self {
        let mut lexicons = HashMap::new();
        for (lang, text) in [
            (LanguageTag::En, BUILTIN_EN),
            (LanguageTag::Es, BUILTIN_ES),
            (LanguageTag::Fr, BUILTIN_FR),
        ] {
            lexicons.insert(lang, Lexicon::parse(text).expect("builtin lexicon is well-formed"));
        }
        let readings =
            LexiconReadings::parse(BUILTIN_JA_READINGS).expect("builtin readings are well-formed");
        Self {
            lexicons,
            readings: Arc::new(readings),
        }
    }

    /// Process-wide instance with the builtin lexicons.
    pub fn shared() -> &'static Syllabifier {
        static SHARED: OnceLock<Syllabifier> = OnceLock::new();
        SHARED.get_or_init(Syllabifier::builtin)
    }

    /// Adds entries for `lang`; entries in `lexicon` take precedence.
    pub fn with_lexicon(mut self, lang: LanguageTag, lexicon: Lexicon) -> Self {
        self.lexicons.entry(lang).or_default().extend(lexicon);
        self
    }

    pub fn with_readings(mut self, readings: Arc<dyn ReadingProvider>) -> Self {
        self.readings = readings;
        self
    }

    /// Loads `en.tsv`, `es.tsv`, `fr.tsv` and `ja_readings.tsv` from `dir`
    /// where present, layering them over the current tables.
    pub fn with_lexicon_dir(mut self, dir: &Path) -> Result<Self, SyllableError> {
        for lang in [LanguageTag::En, LanguageTag::Es, LanguageTag::Fr] {
            let path = dir.join(format!("{}.tsv", lang.code().to_lowercase()));
            if path.exists() {
                self = self.with_lexicon(lang, Lexicon::load(&path)?);
            }
        }
        let path = dir.join("ja_readings.tsv");
        if path.exists() {
            let mut readings = LexiconReadings::parse(BUILTIN_JA_READINGS)?;
            readings.extend(LexiconReadings::load(&path)?);
            self.readings = Arc::new(readings);
        }
        Ok(self)
    }

    pub fn lexicon(&self, lang: LanguageTag) -> Option<&Lexicon> {
        self.lexicons.get(&lang)
    }

    pub fn readings(&self) -> &dyn ReadingProvider {
        self.readings.as_ref()
    }

    /// Expands digits into cardinal words, resolves Japanese kanji to kana,
    /// strips punctuation that does not affect counting and collapses
    /// whitespace.
    pub fn normalize(
        &self,
        lang: LanguageTag,
        text: &str,
        policy: &NormalizationPolicy,
    ) -> Result<String, SyllableError> {
        let mut text: String = text.chars().map(fold_fullwidth_digit).collect();
        if policy.expand_numbers {
            text = expand_digits(lang, &text)?;
        }
        if lang == LanguageTag::Ja {
            text = self.readings.to_kana(&text);
        }
        if policy.strip_punctuation_for_counting {
            text = strip_punctuation(lang, &text);
        }
        let joiner = if lang.is_space_delimited() { " " } else { "" };
        Ok(text.split_whitespace().collect::<Vec<_>>().join(joiner))
    }

    pub fn segment(
        &self,
        lang: LanguageTag,
        text: &str,
        policy: &NormalizationPolicy,
    ) -> Result<SyllableSegmentation, SyllableError> {
        let normalized = self.normalize(lang, text, policy)?;
        let empty = Lexicon::new();
        let lexicon = self.lexicons.get(&lang).unwrap_or(&empty);
        let units = match lang {
            LanguageTag::En => latin::segment_words(&normalized, &english::English, lexicon),
            LanguageTag::Es => latin::segment_words(&normalized, &spanish::Spanish, lexicon),
            LanguageTag::Fr => {
                let rules = french::French {
                    final_e: policy.french_final_e_mode,
                };
                latin::segment_words(&normalized, &rules, lexicon)
            }
            LanguageTag::Ko => hangul::segment(&normalized),
            LanguageTag::Ja => kana::segment(&normalized),
        };
        Ok(SyllableSegmentation {
            count: units.len(),
            units,
            language: lang,
        })
    }

    pub fn count(
        &self,
        lang: LanguageTag,
        text: &str,
        policy: &NormalizationPolicy,
    ) -> Result<usize, SyllableError> {
        Ok(self.segment(lang, text, policy)?.count)
    }
}

/// [`Syllabifier::normalize`] with the builtin tables.
pub fn normalize(
    lang: LanguageTag,
    text: &str,
    policy: &NormalizationPolicy,
) -> Result<String, SyllableError> {
    Syllabifier::shared().normalize(lang, text, policy)
}

/// [`Syllabifier::segment`] with the builtin tables.
pub fn segment(
    lang: LanguageTag,
    text: &str,
    policy: &NormalizationPolicy,
) -> Result<SyllableSegmentation, SyllableError> {
    Syllabifier::shared().segment(lang, text, policy)
}

/// [`Syllabifier::count`] with the builtin tables.
pub fn count_syllables(
    lang: LanguageTag,
    text: &str,
    policy: &NormalizationPolicy,
) -> Result<usize, SyllableError> {
    Syllabifier::shared().count(lang, text, policy)
}

fn fold_fullwidth_digit(c: char) -> char {
    match c {
        '０'..='９' => char::from_u32(c as u32 - '０' as u32 + '0' as u32).unwrap_or(c),
        _ => c,
    }
}

fn expand_digits(lang: LanguageTag, text: &str) -> Result<String, SyllableError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_ascii_digit() {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let digits: String = chars[start..i].iter().collect();
        // a minus sign is only read as such at the start of a token
        let negative = start > 0
            && chars[start - 1] == '-'
            && (start == 1 || chars[start - 2].is_whitespace());
        let significant = digits.trim_start_matches('0');
        if significant.len() > 6 {
            let sign = if negative { "-" } else { "" };
            return Err(SyllableError::UnsupportedNumber(format!("{sign}{digits}")));
        }
        let value: i64 = significant.parse().unwrap_or(0);
        if negative {
            out.pop();
        }
        let words = expand_number(lang, if negative { -value } else { value })?;
        if lang.is_space_delimited() {
            if out.chars().last().is_some_and(|c| c.is_alphanumeric()) {
                out.push(' ');
            }
            out.push_str(&words);
            if chars.get(i).is_some_and(|c| c.is_alphanumeric()) {
                out.push(' ');
            }
        } else {
            out.push_str(&words);
        }
    }
    Ok(out)
}

fn strip_punctuation(lang: LanguageTag, text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        if latin::is_letter(c) || c.is_numeric() || c.is_whitespace() {
            out.push(c);
            continue;
        }
        let between_letters = i > 0
            && latin::is_letter(chars[i - 1])
            && chars.get(i + 1).is_some_and(|&n| latin::is_letter(n));
        let joins_word = latin::is_apostrophe(c) || latin::is_hyphen(c);
        if lang.is_space_delimited() && joins_word && between_letters {
            out.push(c);
        } else if lang.is_space_delimited() {
            out.push(' ');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use LanguageTag::*;

    fn p() -> NormalizationPolicy {
        NormalizationPolicy::default()
    }

    fn count(lang: LanguageTag, text: &str) -> usize {
        count_syllables(lang, text, &p()).unwrap()
    }

    fn units(lang: LanguageTag, text: &str) -> Vec<String> {
        segment(lang, text, &p()).unwrap().units
    }

    #[test]
    fn policy_defaults() {
        assert_eq!(p(), NormalizationPolicy {
            expand_numbers: true,
            strip_punctuation_for_counting: true,
            french_final_e_mode: FrenchFinalE::Mute,
        });
    }

    #[test]
    fn normalize_expands_numbers() {
        assert_eq!(normalize(En, "2 cats", &p()).unwrap(), "two cats");
        assert_eq!(normalize(Es, "3 meses", &p()).unwrap(), "tres meses");
        assert_eq!(normalize(Ko, "텍스트", &p()).unwrap(), "텍스트");
        assert_eq!(normalize(En, "catch-22!", &p()).unwrap(), "catch-twenty-two");
        assert_eq!(normalize(En, "-5 degrees", &p()).unwrap(), "minus five degrees");
        assert_eq!(normalize(Ja, "３つ", &p()).unwrap(), "さんつ");
    }

    #[test]
    fn normalize_strips_punctuation_but_keeps_word_joiners() {
        assert_eq!(
            normalize(En, "Remember me, don't  let it make you cry!", &p()).unwrap(),
            "Remember me don't let it make you cry"
        );
        assert_eq!(normalize(Fr, "« l'amour »", &p()).unwrap(), "l'amour");
        assert_eq!(normalize(Ja, "「ちょっと」、", &p()).unwrap(), "ちょっと");
        let keep = NormalizationPolicy {
            strip_punctuation_for_counting: false,
            ..p()
        };
        assert_eq!(normalize(En, "me,  you", &keep).unwrap(), "me, you");
    }

    #[test]
    fn normalize_rejects_huge_numbers() {
        assert!(matches!(
            normalize(En, "1000000 miles", &p()),
            Err(SyllableError::UnsupportedNumber(_))
        ));
        assert!(normalize(En, "000999999", &p()).is_ok());
    }

    #[test]
    fn quoted_line_counts() {
        assert_eq!(count(En, "And there's a butterfly"), 6);
        assert_eq!(count(En, "Remember me, don't let it make you cry"), 10);
        assert_eq!(count(En, "Three months of winter coolness"), 7);
        assert_eq!(count(Ko, "나비가 날아와"), 6);
        assert_eq!(count(Ko, "날 잊지 마 슬퍼하지는 마"), 10);
        assert_eq!(count(Ja, "ちょっと"), 3);
    }

    #[test]
    fn quoted_segmentations() {
        assert_eq!(units(En, "coolness"), vec!["cool", "ness"]);
        assert_eq!(
            units(En, "And there's a butterfly"),
            vec!["And", "there's", "a", "but", "ter", "fly"]
        );
        assert_eq!(
            units(En, "Three months of winter coolness"),
            vec!["Three", "months", "of", "win", "ter", "cool", "ness"]
        );
        assert_eq!(units(Ko, "나비"), vec!["나", "비"]);
        assert_eq!(units(Es, "tierra"), vec!["tie", "rra"]);
    }

    #[test]
    fn punctuation_rides_along_when_not_stripped() {
        let keep = NormalizationPolicy {
            strip_punctuation_for_counting: false,
            ..p()
        };
        let seg = segment(En, "Remember me, don't let it make you cry", &keep).unwrap();
        assert_eq!(
            seg.units,
            vec!["Re", "mem", "ber", "me,", "don't", "let", "it", "make", "you", "cry"]
        );
        let seg = segment(En, "\u{2014} oh", &keep).unwrap();
        assert_eq!(seg.units, vec!["\u{2014}oh"]);
    }

    #[test]
    fn text_without_countable_units_is_zero() {
        assert_eq!(count(En, "!!!"), 0);
        assert_eq!(count(Ko, "OK"), 0);
        assert_eq!(count(Ja, "…"), 0);
        assert_eq!(count(En, ""), 0);
    }

    #[test]
    fn french_numbers_and_modes() {
        assert_eq!(count(Fr, "21"), 3);
        let sung = NormalizationPolicy {
            french_final_e_mode: FrenchFinalE::Sounded,
            ..p()
        };
        assert_eq!(count_syllables(Fr, "le monde entier", &p()).unwrap(), 4);
        assert_eq!(count_syllables(Fr, "le monde entier", &sung).unwrap(), 5);
    }

    #[test]
    fn japanese_kanji_resolved_through_readings() {
        // 夢 is in the shipped reading lexicon
        assert_eq!(count(Ja, "夢"), 2);
        let mut readings = LexiconReadings::default();
        readings.insert("星", "ほし");
        let syl = Syllabifier::rules_only().with_readings(Arc::new(readings));
        assert_eq!(syl.count(Ja, "星", &p()).unwrap(), 2);
        assert_eq!(Syllabifier::rules_only().count(Ja, "星", &p()).unwrap(), 1);
    }

    #[test]
    fn lexicon_overrides_rules() {
        let mut lex = Lexicon::new();
        lex.insert("fire", LexiconEntry::Count(2));
        lex.insert("orange", LexiconEntry::Syllables(vec!["or".into(), "ange".into()]));
        let syl = Syllabifier::rules_only().with_lexicon(En, lex);
        assert_eq!(syl.count(En, "fire", &p()).unwrap(), 2);
        assert_eq!(syl.segment(En, "Orange!", &p()).unwrap().units, vec!["Or", "ange"]);
        assert_eq!(Syllabifier::rules_only().count(En, "fire", &p()).unwrap(), 1);
    }

    #[test]
    fn lexicon_dir_is_layered() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("en.tsv"), "fire\t2\n").unwrap();
        std::fs::write(dir.path().join("ja_readings.tsv"), "星\tほし\n").unwrap();
        let syl = Syllabifier::builtin().with_lexicon_dir(dir.path()).unwrap();
        assert_eq!(syl.count(En, "fire", &p()).unwrap(), 2);
        assert_eq!(syl.count(Ja, "星と夢", &p()).unwrap(), 5);
    }
}
