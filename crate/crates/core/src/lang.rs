use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One of the five languages covered by the benchmark.
///
/// English is the only language that plays the "original" role; the other
/// four appear as dubbed references or translation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LanguageTag {
    En,
    Es,
    Fr,
    Ko,
    Ja,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported language code `{0}` (expected one of EN, ES, FR, KO, JA)")]
pub struct ParseLanguageError(pub String);

impl LanguageTag {
    pub const ALL: [LanguageTag; 5] = [
        LanguageTag::En,
        LanguageTag::Es,
        LanguageTag::Fr,
        LanguageTag::Ko,
        LanguageTag::Ja,
    ];

    /// Row order used by the statistics table.
    pub const TABLE_ORDER: [LanguageTag; 5] = [
        LanguageTag::En,
        LanguageTag::Es,
        LanguageTag::Fr,
        LanguageTag::Ja,
        LanguageTag::Ko,
    ];

    pub fn code(self) -> &'static str {
        match self {
            LanguageTag::En => "EN",
            LanguageTag::Es => "ES",
            LanguageTag::Fr => "FR",
            LanguageTag::Ko => "KO",
            LanguageTag::Ja => "JA",
        }
    }

    /// English name, as substituted into prompts.
    pub fn name(self) -> &'static str {
        match self {
            LanguageTag::En => "English",
            LanguageTag::Es => "Spanish",
            LanguageTag::Fr => "French",
            LanguageTag::Ko => "Korean",
            LanguageTag::Ja => "Japanese",
        }
    }

    pub fn is_original(self) -> bool {
        self == LanguageTag::En
    }

    /// Languages whose orthography separates words with spaces.
    pub fn is_space_delimited(self) -> bool {
        !matches!(self, LanguageTag::Ja)
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for LanguageTag {
    type Err = ParseLanguageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EN" => Ok(LanguageTag::En),
            "ES" => Ok(LanguageTag::Es),
            "FR" => Ok(LanguageTag::Fr),
            "KO" => Ok(LanguageTag::Ko),
            "JA" => Ok(LanguageTag::Ja),
            _ => Err(ParseLanguageError(s.to_string())),
        }
    }
}

impl Serialize for LanguageTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for LanguageTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_case_insensitively() {
        assert_eq!("ko".parse::<LanguageTag>().unwrap(), LanguageTag::Ko);
        assert_eq!(" JA ".parse::<LanguageTag>().unwrap(), LanguageTag::Ja);
        assert!("ZH".parse::<LanguageTag>().is_err());
    }

    #[test]
    fn only_english_is_original() {
        let originals: Vec<_> = LanguageTag::ALL.iter().filter(|l| l.is_original()).collect();
        assert_eq!(originals, vec![&LanguageTag::En]);
    }
}
