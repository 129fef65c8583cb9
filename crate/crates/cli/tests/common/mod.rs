#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use singable::data::{default_tokenizer, encode_line, serialize_dataset, Dataset, LyricLine, Section, SongEntry, TimeSpan};
use singable::harness::RunConfig;
use singable::LanguageTag;

pub fn line(lang: LanguageTag, index: usize, text: &str, media: bool) -> LyricLine {
    let start = 1000 * (index as u64 + 1) * 4;
    LyricLine {
        index,
        rep: encode_line(lang, text, default_tokenizer(lang)).unwrap(),
        resolved_text: Some(text.to_string()),
        time_span: media.then(|| TimeSpan::new(start, start + 3000).unwrap()),
        syllable_count: None,
    }
}

pub fn entry(lang: LanguageTag, sections: &[&[&str]], media: bool) -> SongEntry {
    SongEntry {
        title: format!("song ({lang})"),
        source_url: "https://example.org/lyrics".into(),
        media_url: media.then(|| "https://example.org/clip.mp4".to_string()),
        language: lang,
        sections: sections
            .iter()
            .enumerate()
            .map(|(i, lines)| Section {
                index: i,
                lines: lines.iter().enumerate().map(|(j, t)| line(lang, j, t, media)).collect(),
            })
            .collect(),
    }
}

pub fn dataset(songs: Vec<(&str, Vec<SongEntry>)>) -> Dataset {
    Dataset {
        songs: songs
            .into_iter()
            .map(|(id, entries)| (id.to_string(), entries.into_iter().map(|e| (e.language, e)).collect::<BTreeMap<_, _>>()))
            .collect(),
    }
}

/// Model reply carrying a final answer in the expected JSON shape.
pub fn answer(text: &str) -> String {
    format!("1. Core lyric identified.\n4. Final:\n{{\"translation\": \"{text}\"}}")
}

/// Writes the dataset and a keyed mock script; each `(source line, replies)`
/// pair becomes one rule.
pub fn workspace(dir: &Path, ds: &Dataset, rules: &[(&str, Vec<String>)]) -> RunConfig {
    let dataset: PathBuf = dir.join("dataset.json");
    std::fs::write(&dataset, serialize_dataset(ds)).unwrap();
    let script = serde_json::json!({
        "rules": rules.iter().map(|(k, r)| serde_json::json!({"contains": k, "replies": r})).collect::<Vec<_>>(),
    });
    let mock_script = dir.join("mock.json");
    std::fs::write(&mock_script, serde_json::to_vec_pretty(&script).unwrap()).unwrap();
    RunConfig {
        dataset,
        mock_script: Some(mock_script),
        target_langs: vec![LanguageTag::Ko],
        out_dir: dir.join("runs"),
        retry: singable::providers::RetryPolicy::no_delay(2),
        ..Default::default()
    }
}
