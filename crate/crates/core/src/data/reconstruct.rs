use serde::{Deserialize, Serialize};

use super::codec::{match_line, Tokenizer};
use super::SongEntry;

/// Position of a line inside a song.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LineLocator {
    pub section: usize,
    pub line: usize,
}

/// Re-attaches text fetched from the song's source page to its lines.
///
/// Lines are matched greedily in order: each line takes the next candidate
/// whose encoding equals its compact representation, skipping anything in
/// between (headers, ads, repeated markers). A line that finds no match is
/// reported and the search for the following line resumes where it was.
/// Lines that already carry text keep it.
pub fn reconstruct_song(
    entry: &SongEntry,
    candidate_lines: &[String],
    tokenizer: &dyn Tokenizer,
) -> (SongEntry, Vec<LineLocator>) {
    let lang = entry.language;
    let mut resolved = entry.clone();
    let mut unmatched = Vec::new();
    let mut cursor = 0;
    for section in &mut resolved.sections {
        for line in &mut section.lines {
            let found = candidate_lines[cursor..]
                .iter()
                .position(|c| match_line(&line.rep, c.trim(), lang, tokenizer));
            match found {
                Some(offset) => {
                    if line.resolved_text.is_none() {
                        line.resolved_text = Some(candidate_lines[cursor + offset].trim().to_string());
                    }
                    cursor += offset + 1;
                }
                None if line.resolved_text.is_some() => {}
                None => unmatched.push(LineLocator {
                    section: section.index,
                    line: line.index,
                }),
            }
        }
    }
    (resolved, unmatched)
}
