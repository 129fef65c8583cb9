//! Spanish: strong/weak vowel nuclei with diphthong and hiatus rules.

use std::ops::Range;

use super::latin::{lexicon_starts, romance_onset, starts_from_nuclei, vowel_runs, WordRules};
use super::lexicon::Lexicon;

pub(crate) struct Spanish;

const DIGRAPHS: &[&str] = &["ch", "ll", "rr"];
const INSEPARABLE: &[&str] = &[
    "pl", "pr", "bl", "br", "cl", "cr", "dr", "fl", "fr", "gl", "gr", "tr", "kl", "kr",
];

fn strong(c: char) -> bool {
    // accented i/u break a diphthong, so they pattern with the strong vowels
    matches!(c, 'a' | 'e' | 'o' | 'á' | 'é' | 'ó' | 'í' | 'ú')
}

fn weak(c: char) -> bool {
    matches!(c, 'i' | 'u' | 'ü')
}

fn is_vowel_at(word: &[char], i: usize) -> bool {
    let c = word[i];
    let prev = i.checked_sub(1).map(|p| word[p]);
    let next = word.get(i + 1).copied();
    match c {
        // silent u in que/qui, gue/gui
        'u' if prev == Some('q') => false,
        'u' if prev == Some('g') && matches!(next, Some('e' | 'i' | 'é' | 'í')) => false,
        'y' => match next {
            None => true,
            Some(n) => !(strong(n) || weak(n)),
        },
        _ => strong(c) || weak(c),
    }
}

pub(crate) fn nuclei(word: &[char]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    for run in vowel_runs(word.len(), |i| is_vowel_at(word, i)) {
        let mut start = run.start;
        for i in run.start + 1..run.end {
            if strong(word[i - 1]) && strong(word[i]) {
                out.push(start..i);
                start = i;
            }
        }
        out.push(start..run.end);
    }
    out
}

pub(crate) fn onset(cluster: &[char]) -> usize {
    romance_onset(cluster, DIGRAPHS, INSEPARABLE)
}

impl WordRules for Spanish {
    fn syllable_starts(&self, word: &[char], lexicon: &Lexicon) -> Vec<usize> {
        let ruled = || starts_from_nuclei(word, &nuclei(word), onset);
        lexicon_starts(word, lexicon, ruled).unwrap_or_else(ruled)
    }
}
