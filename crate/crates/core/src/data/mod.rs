//! Dataset schema, JSON codec, compact line representation and statistics.
//!
//! The on-disk format maps song id → language code → song entry. Lines are
//! stored as compact representations; lyric text is only present once it
//! has been re-attached locally (see [`reconstruct_song`]).

mod codec;
mod reconstruct;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::lang::LanguageTag;

pub use codec::{
    default_tokenizer, encode_line, match_line, CompactLineRep, FnTokenizer, ScriptRunTokenizer,
    Tokenizer, WhitespaceTokenizer,
};
pub use reconstruct::{reconstruct_song, LineLocator};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DataError {
    #[error("malformed JSON at byte {offset} (line {line}, column {column}): {message}")]
    Syntax {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
    #[error("invalid compact representation: {0}")]
    InvalidRep(String),
    #[error("line is empty")]
    EmptyLine,
    #[error("{0} lines need a morphological tokenizer")]
    TokenizerRequired(LanguageTag),
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
}

/// Half-open time range of a line in its media, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeSpan {
    pub start_ms: u64,
    pub end_ms: u64,
}

impl TimeSpan {
    pub fn new(start_ms: u64, end_ms: u64) -> Result<Self, DataError> {
        if start_ms >= end_ms {
            return Err(DataError::Validation {
                path: "time_span".into(),
                message: format!("start {start_ms} must precede end {end_ms}"),
            });
        }
        Ok(Self { start_ms, end_ms })
    }

    /// Widens the span by `margin_ms` on both sides, saturating at zero.
    pub fn widened(self, margin_ms: u64) -> Self {
        Self {
            start_ms: self.start_ms.saturating_sub(margin_ms),
            end_ms: self.end_ms.saturating_add(margin_ms),
        }
    }
}

impl Serialize for TimeSpan {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.start_ms, self.end_ms].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TimeSpan {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [start, end] = <[u64; 2]>::deserialize(deserializer)?;
        TimeSpan::new(start, end).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LyricLine {
    pub index: usize,
    pub rep: CompactLineRep,
    pub resolved_text: Option<String>,
    pub time_span: Option<TimeSpan>,
    pub syllable_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub index: usize,
    pub lines: Vec<LyricLine>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SongEntry {
    pub title: String,
    pub source_url: String,
    pub media_url: Option<String>,
    pub language: LanguageTag,
    pub sections: Vec<Section>,
}

impl SongEntry {
    pub fn lines(&self) -> impl Iterator<Item = (&Section, &LyricLine)> {
        self.sections.iter().flat_map(|s| s.lines.iter().map(move |l| (s, l)))
    }

    pub fn line(&self, at: LineLocator) -> Option<&LyricLine> {
        self.sections.get(at.section)?.lines.get(at.line)
    }

    pub fn line_count(&self) -> usize {
        self.sections.iter().map(|s| s.lines.len()).sum()
    }
}

/// All songs, keyed by song id and then language.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    pub songs: BTreeMap<String, BTreeMap<LanguageTag, SongEntry>>,
}

/// How unknown JSON fields are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Unknown fields are ignored.
    #[default]
    Lenient,
    /// Unknown fields are a validation error.
    Strict,
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub mode: ParseMode,
    /// Check that any stored line text encodes to the line's representation.
    pub verify_text: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            mode: ParseMode::Lenient,
            verify_text: true,
        }
    }
}

fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in input.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(input.len());
        }
        offset += l.len() + 1;
    }
    input.len()
}

struct Walker {
    mode: ParseMode,
}

impl Walker {
    fn invalid(path: &str, message: impl Into<String>) -> DataError {
        DataError::Validation {
            path: path.to_string(),
            message: message.into(),
        }
    }

    fn object<'a>(
        &self,
        value: &'a Value,
        path: &str,
        allowed: &[&str],
    ) -> Result<&'a Map<String, Value>, DataError> {
        let obj = value
            .as_object()
            .ok_or_else(|| Self::invalid(path, "expected an object"))?;
        if self.mode == ParseMode::Strict {
            if let Some(unknown) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(Self::invalid(path, format!("unknown field `{unknown}`")));
            }
        }
        Ok(obj)
    }

    fn string(obj: &Map<String, Value>, key: &str, path: &str) -> Result<String, DataError> {
        obj.get(key)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Self::invalid(path, format!("`{key}` must be a string")))
    }

    fn optional<T: serde::de::DeserializeOwned>(
        obj: &Map<String, Value>,
        key: &str,
        path: &str,
    ) -> Result<Option<T>, DataError> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| Self::invalid(path, format!("`{key}`: {e}"))),
        }
    }

    fn index(obj: &Map<String, Value>, path: &str) -> Result<usize, DataError> {
        obj.get("index")
            .and_then(Value::as_u64)
            .map(|i| i as usize)
            .ok_or_else(|| Self::invalid(path, "`index` must be a non-negative integer"))
    }

    fn line(&self, value: &Value, path: &str) -> Result<LyricLine, DataError> {
        let obj = self.object(value, path, &["index", "rep", "time_span", "syllable_count", "text"])?;
        let rep_value = obj.get("rep").ok_or_else(|| Self::invalid(path, "missing `rep`"))?;
        let rep: CompactLineRep = serde_json::from_value(rep_value.clone())
            .map_err(|e| Self::invalid(path, format!("`rep`: {e}")))?;
        Ok(LyricLine {
            index: Self::index(obj, path)?,
            rep,
            resolved_text: Self::optional(obj, "text", path)?,
            time_span: Self::optional(obj, "time_span", path)?,
            syllable_count: Self::optional(obj, "syllable_count", path)?,
        })
    }

    fn entry(&self, value: &Value, lang: LanguageTag, path: &str) -> Result<SongEntry, DataError> {
        let obj = self.object(value, path, &["title", "source_url", "media_url", "sections"])?;
        let sections_value = obj
            .get("sections")
            .and_then(Value::as_array)
            .ok_or_else(|| Self::invalid(path, "`sections` must be an array"))?;
        let mut sections = Vec::with_capacity(sections_value.len());
        for (si, section) in sections_value.iter().enumerate() {
            let spath = format!("{path}/section[{si}]");
            let sobj = self.object(section, &spath, &["index", "lines"])?;
            let lines_value = sobj
                .get("lines")
                .and_then(Value::as_array)
                .ok_or_else(|| Self::invalid(&spath, "`lines` must be an array"))?;
            let lines = lines_value
                .iter()
                .enumerate()
                .map(|(li, l)| self.line(l, &format!("{spath}/line[{li}]")))
                .collect::<Result<Vec<_>, _>>()?;
            sections.push(Section {
                index: Self::index(sobj, &spath)?,
                lines,
            });
        }
        Ok(SongEntry {
            title: Self::string(obj, "title", path)?,
            source_url: Self::string(obj, "source_url", path)?,
            media_url: Self::optional(obj, "media_url", path)?,
            language: lang,
            sections,
        })
    }
}

/// Parses a dataset document with default options.
pub fn parse_dataset(bytes: &[u8]) -> Result<Dataset, DataError> {
    parse_dataset_with(bytes, ParseOptions::default())
}

pub fn parse_dataset_with(bytes: &[u8], options: ParseOptions) -> Result<Dataset, DataError> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| DataError::Syntax {
        offset: byte_offset(bytes, e.line(), e.column()),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let walker = Walker { mode: options.mode };
    let songs_obj = root
        .as_object()
        .ok_or_else(|| Walker::invalid("$", "top level must map song ids to languages"))?;
    let mut dataset = Dataset::default();
    for (song_id, langs) in songs_obj {
        let langs_obj = langs
            .as_object()
            .ok_or_else(|| Walker::invalid(song_id, "expected a map of language codes"))?;
        let mut entries = BTreeMap::new();
        for (code, entry) in langs_obj {
            let path = format!("{song_id}/{code}");
            let lang: LanguageTag = code
                .parse()
                .map_err(|e: crate::lang::ParseLanguageError| Walker::invalid(&path, e.to_string()))?;
            entries.insert(lang, walker.entry(entry, lang, &path)?);
        }
        dataset.songs.insert(song_id.clone(), entries);
    }
    validate(&dataset, options.verify_text)?;
    Ok(dataset)
}

/// Checks every dataset invariant, naming the offending song / section / line.
pub fn validate(dataset: &Dataset, verify_text: bool) -> Result<(), DataError> {
    for (song_id, entries) in &dataset.songs {
        if !entries.contains_key(&LanguageTag::En) {
            return Err(Walker::invalid(song_id, "no EN entry (every song needs its original)"));
        }
        for (lang, entry) in entries {
            let path = format!("{song_id}/{lang}");
            if entry.language != *lang {
                return Err(Walker::invalid(&path, "entry language disagrees with its key"));
            }
            if entry.source_url.trim().is_empty() {
                return Err(Walker::invalid(&path, "`source_url` is empty"));
            }
            for (si, section) in entry.sections.iter().enumerate() {
                let spath = format!("{path}/section {}", section.index);
                if section.index != si {
                    return Err(Walker::invalid(&spath, format!("expected section index {si}")));
                }
                for (li, line) in section.lines.iter().enumerate() {
                    let lpath = format!("{spath}/line {}", line.index);
                    if line.index != li {
                        return Err(Walker::invalid(&lpath, format!("expected line index {li}")));
                    }
                    if let (true, Some(text)) = (verify_text, &line.resolved_text) {
                        if !match_line(&line.rep, text, *lang, default_tokenizer(*lang)) {
                            return Err(Walker::invalid(
                                &lpath,
                                format!("text does not match representation {}", line.rep),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn line_to_value(line: &LyricLine) -> Value {
    let mut obj = Map::new();
    obj.insert("index".into(), line.index.into());
    obj.insert("rep".into(), serde_json::to_value(&line.rep).expect("rep serializes"));
    if let Some(text) = &line.resolved_text {
        obj.insert("text".into(), text.clone().into());
    }
    if let Some(span) = line.time_span {
        obj.insert("time_span".into(), serde_json::to_value(span).expect("span serializes"));
    }
    if let Some(count) = line.syllable_count {
        obj.insert("syllable_count".into(), count.into());
    }
    Value::Object(obj)
}

fn entry_to_value(entry: &SongEntry) -> Value {
    let mut obj = Map::new();
    obj.insert("title".into(), entry.title.clone().into());
    obj.insert("source_url".into(), entry.source_url.clone().into());
    if let Some(media) = &entry.media_url {
        obj.insert("media_url".into(), media.clone().into());
    }
    let sections = entry
        .sections
        .iter()
        .map(|s| {
            let mut sobj = Map::new();
            sobj.insert("index".into(), s.index.into());
            sobj.insert("lines".into(), Value::Array(s.lines.iter().map(line_to_value).collect()));
            Value::Object(sobj)
        })
        .collect();
    obj.insert("sections".into(), Value::Array(sections));
    Value::Object(obj)
}

/// Serializes to pretty-printed JSON with songs and languages in sorted
/// order; absent optional fields are omitted.
pub fn serialize_dataset(dataset: &Dataset) -> Vec<u8> {
    let mut root = Map::new();
    for (song_id, entries) in &dataset.songs {
        let mut langs = Map::new();
        for (lang, entry) in entries {
            langs.insert(lang.code().to_string(), entry_to_value(entry));
        }
        root.insert(song_id.clone(), Value::Object(langs));
    }
    let mut bytes = serde_json::to_vec_pretty(&Value::Object(root)).expect("dataset serializes");
    bytes.push(b'\n');
    bytes
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageStats {
    pub songs: usize,
    /// Songs with a media reference.
    pub videos: usize,
    pub sections: usize,
    pub lines: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub per_language: BTreeMap<LanguageTag, LanguageStats>,
}

impl StatsReport {
    /// Counts for `lang`; all zeros when the language is absent.
    pub fn get(&self, lang: LanguageTag) -> LanguageStats {
        self.per_language.get(&lang).copied().unwrap_or_default()
    }

    pub fn has(&self, lang: LanguageTag) -> bool {
        self.per_language.get(&lang).is_some_and(|s| s.songs > 0)
    }
}

pub fn dataset_stats(dataset: &Dataset) -> StatsReport {
    let mut report = StatsReport::default();
    for entries in dataset.songs.values() {
        for (lang, entry) in entries {
            let stats = report.per_language.entry(*lang).or_default();
            stats.songs += 1;
            stats.videos += usize::from(entry.media_url.is_some());
            stats.sections += entry.sections.len();
            stats.lines += entry.line_count();
        }
    }
    report
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>8} {:>8} {:>10} {:>8}", "Language", "# Songs", "# Video", "# Sections", "# Lines")?;
        for lang in LanguageTag::TABLE_ORDER {
            if self.has(lang) {
                let s = self.get(lang);
                writeln!(f, "{:<10} {:>8} {:>8} {:>10} {:>8}", lang.name(), s.songs, s.videos, s.sections, s.lines)?;
            } else {
                writeln!(f, "{:<10} {:>8} {:>8} {:>10} {:>8}", lang.name(), "-", "-", "-", "-")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_LINE: &str = r#"{
      "remember-me": {
        "EN": {
          "title": "Remember Me",
          "source_url": "https://example.org/lyrics/remember-me",
          "media_url": null,
          "sections": [
            { "index": 0, "lines": [
              { "index": 0, "rep": ["RmtIhtsg", "Remember", "goodbye"],
                "time_span": [1000, 4200], "syllable_count": 11 }
            ] }
          ]
        }
      }
    }"#;

    fn line(index: usize, text: &str) -> LyricLine {
        LyricLine {
            index,
            rep: encode_line(LanguageTag::En, text, &WhitespaceTokenizer).unwrap(),
            resolved_text: None,
            time_span: None,
            syllable_count: None,
        }
    }

    fn entry(lang: LanguageTag, sections: Vec<Vec<&str>>, media: bool) -> SongEntry {
        SongEntry {
            title: "t".into(),
            source_url: "https://example.org/s".into(),
            media_url: media.then(|| "https://example.org/v.mp4".to_string()),
            language: lang,
            sections: sections
                .into_iter()
                .enumerate()
                .map(|(i, lines)| Section {
                    index: i,
                    lines: lines.into_iter().enumerate().map(|(j, t)| line(j, t)).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn parses_one_line_document() {
        let d = parse_dataset(ONE_LINE.as_bytes()).unwrap();
        assert_eq!(d.songs.len(), 1);
        let en = &d.songs["remember-me"][&LanguageTag::En];
        assert_eq!(en.sections.len(), 1);
        assert_eq!(en.line_count(), 1);
        let l = &en.sections[0].lines[0];
        assert_eq!(l.rep.signature(), "RmtIhtsg");
        assert_eq!(l.time_span, Some(TimeSpan { start_ms: 1000, end_ms: 4200 }));
        assert_eq!(l.syllable_count, Some(11));
        assert_eq!(en.media_url, None);
    }

    #[test]
    fn empty_document() {
        let d = parse_dataset(b"{}").unwrap();
        assert!(d.songs.is_empty());
        assert_eq!(serialize_dataset(&d), b"{}\n");
    }

    #[test]
    fn missing_english_sibling_is_rejected() {
        let doc = ONE_LINE.replace("\"EN\"", "\"KO\"");
        let err = parse_dataset(doc.as_bytes()).unwrap_err();
        match err {
            DataError::Validation { path, .. } => assert_eq!(path, "remember-me"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_report_byte_offset() {
        let doc = b"{\n  \"a\": [1,\n}";
        match parse_dataset(doc).unwrap_err() {
            DataError::Syntax { offset, line, .. } => {
                assert_eq!(line, 3);
                assert_eq!(doc[offset], b'}');
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_names_the_line() {
        let doc = ONE_LINE.replace("[1000, 4200]", "[5000, 4200]");
        let err = parse_dataset(doc.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("remember-me/EN/section[0]/line[0]"), "{err}");

        let doc = ONE_LINE.replace("\"index\": 0, \"rep\"", "\"index\": 3, \"rep\"");
        let err = parse_dataset(doc.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("remember-me/EN/section 0/line 3"), "{err}");

        let doc = ONE_LINE.replace("https://example.org/lyrics/remember-me", " ");
        assert!(parse_dataset(doc.as_bytes()).is_err());
    }

    #[test]
    fn strict_mode_rejects_unknown_fields() {
        let doc = ONE_LINE.replace("\"title\"", "\"artist\": \"x\", \"title\"");
        assert!(parse_dataset(doc.as_bytes()).is_ok());
        let strict = ParseOptions {
            mode: ParseMode::Strict,
            ..Default::default()
        };
        let err = parse_dataset_with(doc.as_bytes(), strict).unwrap_err().to_string();
        assert!(err.contains("unknown field `artist`"), "{err}");
        assert!(parse_dataset_with(ONE_LINE.as_bytes(), strict).is_ok());
    }

    #[test]
    fn stored_text_must_match_rep() {
        let good = ONE_LINE.replace(
            "\"time_span\"",
            "\"text\": \"Remember me though I have to say goodbye\", \"time_span\"",
        );
        assert!(parse_dataset(good.as_bytes()).is_ok());
        let bad = ONE_LINE.replace("\"time_span\"", "\"text\": \"Remember me\", \"time_span\"");
        assert!(parse_dataset(bad.as_bytes()).is_err());
    }

    #[test]
    fn round_trip_omits_absent_fields() {
        let d = parse_dataset(ONE_LINE.as_bytes()).unwrap();
        let bytes = serialize_dataset(&d);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(!text.contains("media_url"));
        assert!(!text.contains("\"text\""));
        assert_eq!(parse_dataset(&bytes).unwrap(), d);
    }

    #[test]
    fn stats_count_per_language() {
        let mut d = Dataset::default();
        let a = entry(LanguageTag::En, vec![vec!["a b", "c d"], vec!["e f", "g h", "i j"]], true);
        let b = entry(LanguageTag::En, vec![vec!["k l", "m n"]], false);
        let es = entry(LanguageTag::Es, vec![vec!["o p"]], false);
        d.songs.insert("s1".into(), BTreeMap::from([(LanguageTag::En, a), (LanguageTag::Es, es)]));
        d.songs.insert("s2".into(), BTreeMap::from([(LanguageTag::En, b)]));
        let stats = dataset_stats(&d);
        let en = stats.get(LanguageTag::En);
        assert_eq!((en.songs, en.sections, en.lines, en.videos), (2, 3, 7, 1));
        assert_eq!(stats.get(LanguageTag::Es).songs, 1);
        assert!(!stats.has(LanguageTag::Ko));
        assert_eq!(dataset_stats(&Dataset::default()).get(LanguageTag::En), LanguageStats::default());
        let table = stats.to_string();
        assert!(table.lines().any(|l| l.starts_with("Korean") && l.contains('-')));
    }

    #[test]
    fn reconstruction() {
        let texts = ["Remember me though I have to say goodbye", "Remember me don't let it make you cry"];
        let e = entry(LanguageTag::En, vec![texts.to_vec()], false);
        let exact: Vec<String> = texts.iter().map(|s| s.to_string()).collect();
        let (resolved, unmatched) = reconstruct_song(&e, &exact, &WhitespaceTokenizer);
        assert!(unmatched.is_empty());
        assert_eq!(resolved.sections[0].lines[1].resolved_text.as_deref(), Some(texts[1]));

        let noisy: Vec<String> = vec![
            "[Chorus]".into(),
            texts[0].into(),
            "Advertisement".into(),
            format!("  {}  ", texts[1]),
        ];
        let (resolved, unmatched) = reconstruct_song(&e, &noisy, &WhitespaceTokenizer);
        assert!(unmatched.is_empty());
        assert_eq!(resolved.sections[0].lines[1].resolved_text.as_deref(), Some(texts[1]));

        let (resolved, unmatched) = reconstruct_song(&e, &[], &WhitespaceTokenizer);
        assert_eq!(unmatched.len(), 2);
        assert!(resolved.lines().all(|(_, l)| l.resolved_text.is_none()));

        // idempotent on an already-resolved entry
        let (twice, unmatched) = reconstruct_song(&resolved_full(&e, &exact), &exact, &WhitespaceTokenizer);
        assert!(unmatched.is_empty());
        assert_eq!(twice, resolved_full(&e, &exact));
    }

    fn resolved_full(e: &SongEntry, lines: &[String]) -> SongEntry {
        reconstruct_song(e, lines, &WhitespaceTokenizer).0
    }
}
