//! Compact line representation: the first character of every token plus
//! the first and last tokens verbatim. Enough to recognise a line fetched
//! from its source page without redistributing the text.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lang::LanguageTag;
use crate::syllable::kana::{is_kana, is_kanji};

use super::DataError;

/// Splits a line into tokens.
pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, text: &str) -> Vec<String>;

    /// Whether the tokenizer segments unspaced text into morphemes. Japanese
    /// lines can only be encoded with such a tokenizer.
    fn is_morphological(&self) -> bool {
        false
    }
}

/// Splits on Unicode whitespace; tokens keep their punctuation.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceTokenizer;

impl Tokenizer for WhitespaceTokenizer {
    fn tokenize(&self, text: &str) -> Vec<String> {
        text.split_whitespace().map(str::to_string).collect()
    }
}

/// Heuristic Japanese tokenizer: a kanji run absorbs the hiragana that
/// follows it (okurigana and particles), katakana runs, hiragana runs and
/// other scripts form their own tokens. It stands in for a dictionary-based
/// morphological analyser when none is plugged in.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScriptRunTokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Script {
    Kanji,
    Hiragana,
    Katakana,
    Punct,
    Other,
}

fn script(c: char) -> Script {
    if is_kanji(c) {
        Script::Kanji
    } else if ('\u{30A0}'..='\u{30FF}').contains(&c) {
        Script::Katakana
    } else if is_kana(c) {
        Script::Hiragana
    } else if c.is_alphanumeric() {
        Script::Other
    } else {
        Script::Punct
    }
}

impl Tokenizer for ScriptRunTokenizer {
    fn tokenize(&self, text: &str) -> Vec<String> {
        let mut tokens: Vec<String> = Vec::new();
        let mut current = String::new();
        let mut current_script: Option<Script> = None;
        for c in text.chars() {
            if c.is_whitespace() {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                current_script = None;
                continue;
            }
            let s = script(c);
            let continues = match (current_script, s) {
                (None, _) => false,
                (Some(Script::Kanji), Script::Hiragana) => true,
                (Some(prev), now) => prev == now || now == Script::Punct,
            };
            if !continues && !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            current.push(c);
            // hiragana after kanji keeps the token open for more hiragana only
            current_script = Some(if current_script == Some(Script::Kanji) && s == Script::Hiragana {
                Script::Hiragana
            } else if s == Script::Punct {
                current_script.unwrap_or(Script::Punct)
            } else {
                s
            });
        }
        if !current.is_empty() {
            tokens.push(current);
        }
        tokens
    }

    fn is_morphological(&self) -> bool {
        true
    }
}

/// Tokens supplied by an external analyser, e.g. a closure around MeCab.
pub struct FnTokenizer<F> {
    f: F,
    morphological: bool,
}

impl<F: Fn(&str) -> Vec<String> + Send + Sync> FnTokenizer<F> {
    pub fn morphological(f: F) -> Self {
        Self {
            f,
            morphological: true,
        }
    }

    pub fn plain(f: F) -> Self {
        Self {
            f,
            morphological: false,
        }
    }
}

impl<F: Fn(&str) -> Vec<String> + Send + Sync> Tokenizer for FnTokenizer<F> {
    fn tokenize(&self, text: &str) -> Vec<String> {
        (self.f)(text)
    }

    fn is_morphological(&self) -> bool {
        self.morphological
    }
}

/// The tokenizer used when the caller does not supply one.
pub fn default_tokenizer(lang: LanguageTag) -> &'static dyn Tokenizer {
    match lang {
        LanguageTag::Ja => &ScriptRunTokenizer,
        _ => &WhitespaceTokenizer,
    }
}

/// Copyright-safe fingerprint of one lyric line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompactLineRep {
    signature: String,
    first_token: String,
    last_token: String,
}

impl CompactLineRep {
    pub fn new(signature: &str, first_token: &str, last_token: &str) -> Result<Self, DataError> {
        let bad = |why: &str| DataError::InvalidRep(why.to_string());
        let count = signature.chars().count();
        if count == 0 {
            return Err(bad("empty signature"));
        }
        if first_token.is_empty() || last_token.is_empty() {
            return Err(bad("empty first or last token"));
        }
        if first_token.chars().next() != signature.chars().next() {
            return Err(bad("first token does not start with the signature's first character"));
        }
        if last_token.chars().next() != signature.chars().last() {
            return Err(bad("last token does not start with the signature's last character"));
        }
        if count == 1 && first_token != last_token {
            return Err(bad("single-token line with different first and last tokens"));
        }
        Ok(Self {
            signature: signature.to_string(),
            first_token: first_token.to_string(),
            last_token: last_token.to_string(),
        })
    }

    pub fn signature(&self) -> &str {
        &self.signature
    }

    pub fn first_token(&self) -> &str {
        &self.first_token
    }

    pub fn last_token(&self) -> &str {
        &self.last_token
    }

    pub fn token_count(&self) -> usize {
        self.signature.chars().count()
    }
}

impl fmt::Display for CompactLineRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}, {:?}]", self.signature, self.first_token, self.last_token)
    }
}

impl Serialize for CompactLineRep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [&self.signature, &self.first_token, &self.last_token].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CompactLineRep {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [sig, first, last] = <[String; 3]>::deserialize(deserializer)?;
        CompactLineRep::new(&sig, &first, &last).map_err(serde::de::Error::custom)
    }
}

/// Japanese morphemes are joined in consecutive pairs; an odd trailing
/// morpheme stays alone.
fn pair_tokens(tokens: Vec<String>) -> Vec<String> {
    tokens.chunks(2).map(|pair| pair.concat()).collect()
}

/// Encodes a line into its compact representation.
pub fn encode_line(
    lang: LanguageTag,
    text: &str,
    tokenizer: &dyn Tokenizer,
) -> Result<CompactLineRep, DataError> {
    if text.trim().is_empty() {
        return Err(DataError::EmptyLine);
    }
    let tokens = match lang {
        LanguageTag::Ja => {
            if !tokenizer.is_morphological() {
                return Err(DataError::TokenizerRequired(lang));
            }
            pair_tokens(tokenizer.tokenize(text.trim()))
        }
        _ => tokenizer.tokenize(text.trim()),
    };
    let tokens: Vec<String> = tokens.into_iter().filter(|t| !t.is_empty()).collect();
    let (Some(first), Some(last)) = (tokens.first(), tokens.last()) else {
        return Err(DataError::EmptyLine);
    };
    let signature: String = tokens.iter().filter_map(|t| t.chars().next()).collect();
    CompactLineRep::new(&signature, first, last)
}

/// True iff `candidate` encodes to exactly `rep`.
pub fn match_line(
    rep: &CompactLineRep,
    candidate: &str,
    lang: LanguageTag,
    tokenizer: &dyn Tokenizer,
) -> bool {
    encode_line(lang, candidate, tokenizer).is_ok_and(|r| &r == rep)
}
