use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::data::Dataset;
use crate::lang::LanguageTag;

/// Identity of one dataset line in one language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HypKey {
    pub song_id: String,
    pub language: LanguageTag,
    pub section: usize,
    pub line: usize,
}

impl HypKey {
    pub fn task_id(&self) -> String {
        format!("{}/{}/{}/{}", self.song_id, self.language, self.section, self.line)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisEntry {
    #[serde(flatten)]
    pub key: HypKey,
    pub text: String,
}

/// Translations keyed by line, with where they came from (a provider id or
/// `human`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HypothesisSet {
    pub provenance: String,
    pub entries: BTreeMap<HypKey, String>,
}

#[derive(Serialize, Deserialize)]
struct OnDisk {
    provenance: String,
    entries: Vec<HypothesisEntry>,
}

impl Serialize for HypothesisSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OnDisk {
            provenance: self.provenance.clone(),
            entries: self
                .entries
                .iter()
                .map(|(k, t)| HypothesisEntry {
                    key: k.clone(),
                    text: t.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HypothesisSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let disk = OnDisk::deserialize(d)?;
        let mut entries = BTreeMap::new();
        for e in disk.entries {
            if entries.insert(e.key.clone(), e.text).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate entry {}", e.key.task_id())));
            }
        }
        Ok(Self {
            provenance: disk.provenance,
            entries,
        })
    }
}

impl HypothesisSet {
    pub fn new(provenance: impl Into<String>) -> Self {
        Self {
            provenance: provenance.into(),
            entries: BTreeMap::new(),
        }
    }

    /// The dubbed lyrics themselves, as the human-expert row.
    pub fn from_references(dataset: &Dataset, languages: &[LanguageTag]) -> Self {
        let mut set = Self::new("human");
        for (song_id, entries) in &dataset.songs {
            for (lang, entry) in entries {
                if lang.is_original() || !(languages.is_empty() || languages.contains(lang)) {
                    continue;
                }
                for (section, line) in entry.lines() {
                    if let Some(text) = &line.resolved_text {
                        set.entries.insert(
                            HypKey {
                                song_id: song_id.clone(),
                                language: *lang,
                                section: section.index,
                                line: line.index,
                            },
                            text.clone(),
                        );
                    }
                }
            }
        }
        set
    }

    pub fn languages(&self) -> Vec<LanguageTag> {
        let mut langs: Vec<LanguageTag> = self.entries.keys().map(|k| k.language).collect();
        langs.sort();
        langs.dedup();
        langs
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))
    }

    /// Every key must name a line of the dataset's source entry for that
    /// song (translations are aligned with source lines).
    pub fn check_keys(&self, dataset: &Dataset, source: LanguageTag) -> Result<(), HarnessError> {
        for key in self.entries.keys() {
            let ok = dataset
                .songs
                .get(&key.song_id)
                .and_then(|e| e.get(&source).or_else(|| e.get(&key.language)))
                .and_then(|entry| entry.sections.get(key.section))
                .is_some_and(|s| key.line < s.lines.len());
            if !ok {
                return Err(HarnessError::Data(format!("hypothesis {} names no dataset line", key.task_id())));
            }
        }
        Ok(())
    }
}
