//! Japanese: mora segmentation over kana, with kanji resolved through a
//! pluggable reading provider.

use std::collections::HashMap;
use std::path::Path;

use super::SyllableError;

/// Converts kanji (or mixed) text to a kana reading.
pub trait ReadingProvider: Send + Sync {
    /// Returns `text` with every span the provider can read replaced by kana.
    /// Spans it cannot read are returned unchanged.
    fn to_kana(&self, text: &str) -> String;
}

/// Longest-match replacement from a `surface<TAB>reading` lexicon.
#[derive(Debug, Clone, Default)]
pub struct LexiconReadings {
    readings: HashMap<String, String>,
    longest: usize,
}

impl LexiconReadings {
    pub fn parse(text: &str) -> Result<Self, SyllableError> {
        let mut out = LexiconReadings::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (surface, reading) = line.split_once('\t').ok_or(SyllableError::Lexicon {
                line: lineno + 1,
                message: "expected `surface<TAB>reading`".into(),
            })?;
            let (surface, reading) = (surface.trim(), reading.trim());
            if surface.is_empty() || !reading.chars().all(is_kana) {
                return Err(SyllableError::Lexicon {
                    line: lineno + 1,
                    message: "reading must be non-empty kana".into(),
                });
            }
            out.insert(surface, reading);
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, SyllableError> {
        let text = std::fs::read_to_string(path).map_err(|e| SyllableError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, surface: &str, reading: &str) {
        self.longest = self.longest.max(surface.chars().count());
        self.readings.insert(surface.to_string(), reading.to_string());
    }

    pub fn extend(&mut self, other: LexiconReadings) {
        self.longest = self.longest.max(other.longest);
        self.readings.extend(other.readings);
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }
}

impl ReadingProvider for LexiconReadings {
    fn to_kana(&self, text: &str) -> String {
        let chars: Vec<char> = text.chars().collect();
        let mut out = String::with_capacity(text.len());
        let mut i = 0;
        'outer: while i < chars.len() {
            if is_kanji(chars[i]) {
                let max = self.longest.min(chars.len() - i);
                for len in (1..=max).rev() {
                    let key: String = chars[i..i + len].iter().collect();
                    if let Some(reading) = self.readings.get(&key) {
                        out.push_str(reading);
                        i += len;
                        continue 'outer;
                    }
                }
            }
            out.push(chars[i]);
            i += 1;
        }
        out
    }
}

pub fn is_kanji(c: char) -> bool {
    matches!(c, '\u{4E00}'..='\u{9FFF}' | '\u{3400}'..='\u{4DBF}' | '\u{F900}'..='\u{FAFF}' | '々')
}

pub fn is_kana(c: char) -> bool {
    matches!(c, '\u{3041}'..='\u{3096}' | '\u{309D}'..='\u{309E}' | '\u{30A1}'..='\u{30FA}' | '\u{30FC}'..='\u{30FE}')
}

/// Small kana that merge into the preceding mora (きゃ, ファ).
pub fn is_glide(c: char) -> bool {
    matches!(
        c,
        'ゃ' | 'ゅ' | 'ょ' | 'ぁ' | 'ぃ' | 'ぅ' | 'ぇ' | 'ぉ' | 'ゎ' | 'ャ' | 'ュ' | 'ョ' | 'ァ'
            | 'ィ' | 'ゥ' | 'ェ' | 'ォ' | 'ヮ'
    )
}

/// Katakana to hiragana; other characters pass through.
pub fn to_hiragana(c: char) -> char {
    match c {
        '\u{30A1}'..='\u{30F6}' => char::from_u32(c as u32 - 0x60).unwrap_or(c),
        _ => c,
    }
}

/// Mora units. Each kana is a mora except glides, which merge left; the
/// sokuon っ, the moraic nasal ん and the long mark ー each count one.
/// An unresolved kanji is counted as a single unit.
pub(crate) fn segment(text: &str) -> Vec<String> {
    let mut units: Vec<String> = Vec::new();
    let mut pending = String::new();
    let mut last_was_mora = false;
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        if is_glide(c) && last_was_mora {
            units.last_mut().expect("a mora precedes").push(c);
        } else if is_kana(c) || is_kanji(c) {
            let mut unit = std::mem::take(&mut pending);
            unit.push(c);
            units.push(unit);
            last_was_mora = true;
        } else {
            match units.last_mut() {
                Some(unit) => unit.push(c),
                None => pending.push(c),
            }
            last_was_mora = false;
        }
    }
    units
}

#[cfg(test)]
mod tests {
    use super::*;

    fn morae(s: &str) -> usize {
        segment(s).len()
    }

    #[test]
    fn mora_rules() {
        assert_eq!(segment("ちょっと"), vec!["ちょ", "っ", "と"]);
        assert_eq!(morae("きゃ"), 1);
        assert_eq!(morae("きや"), 2);
        assert_eq!(morae("かっ") - morae("か"), 1);
        assert_eq!(morae("かー") - morae("か"), 1);
        assert_eq!(morae("ほん"), 2);
        assert_eq!(morae("ファイト"), 3);
        assert_eq!(morae("とうきょう"), 4);
    }

    #[test]
    fn leading_glide_stands_alone() {
        assert_eq!(morae("ゃ"), 1);
    }

    #[test]
    fn readings_use_longest_match() {
        let mut r = LexiconReadings::default();
        r.insert("夢", "ゆめ");
        r.insert("夢見", "ゆめみ");
        assert_eq!(r.to_kana("夢見る"), "ゆめみる");
        assert_eq!(r.to_kana("夢と愛"), "ゆめと愛");
    }

    #[test]
    fn katakana_folds_to_hiragana() {
        assert_eq!(to_hiragana('カ'), 'か');
        assert_eq!(to_hiragana('ー'), 'ー');
    }

    #[test]
    fn reading_lexicon_rejects_non_kana() {
        assert!(LexiconReadings::parse("夢\tyume").is_err());
        assert_eq!(LexiconReadings::parse("夢\tゆめ\n").unwrap().len(), 1);
    }
}
