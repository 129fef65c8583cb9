//! French: vowel-group counting with configurable treatment of the final
//! mute e.

use std::ops::Range;

use super::latin::{lexicon_starts, romance_onset, starts_from_nuclei, vowel_runs, WordRules};
use super::lexicon::Lexicon;
use super::FrenchFinalE;

pub(crate) struct French {
    pub(crate) final_e: FrenchFinalE,
}

const DIGRAPHS: &[&str] = &["ch", "ph", "gn", "th"];
const INSEPARABLE: &[&str] = &[
    "bl", "br", "cl", "cr", "dr", "fl", "fr", "gl", "gr", "pl", "pr", "tr", "vr", "chr", "phr",
];

fn plain_vowel(c: char) -> bool {
    matches!(
        c,
        'a' | 'e' | 'i' | 'o' | 'u' | 'y' | 'à' | 'â' | 'ä' | 'é' | 'è' | 'ê' | 'ë' | 'î' | 'ï'
            | 'ô' | 'ö' | 'ù' | 'û' | 'ü' | 'ÿ' | 'œ' | 'æ'
    )
}

fn is_vowel_at(word: &[char], i: usize) -> bool {
    let c = word[i];
    let prev = i.checked_sub(1).map(|p| word[p]);
    let next = word.get(i + 1).copied();
    match c {
        'u' if prev == Some('q') => false,
        'u' if prev == Some('g') && matches!(next, Some('e' | 'i' | 'é' | 'è' | 'ê' | 'y')) => false,
        'y' => {
            let next_vowel = next.is_some_and(plain_vowel);
            let prev_vowel = prev.is_some_and(plain_vowel);
            !(next_vowel && (i == 0 || prev_vowel))
        }
        _ => plain_vowel(c),
    }
}

pub(crate) fn nuclei(word: &[char], final_e: FrenchFinalE) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    for run in vowel_runs(word.len(), |i| is_vowel_at(word, i)) {
        let mut start = run.start;
        for i in run.start + 1..run.end {
            // diaeresis opens a new nucleus; é before a vowel is a hiatus
            if matches!(word[i], 'ï' | 'ë' | 'ü') || word[i - 1] == 'é' {
                out.push(start..i);
                start = i;
            }
        }
        out.push(start..run.end);
    }
    if final_e == FrenchFinalE::Mute && out.len() >= 2 {
        let last = out[out.len() - 1].clone();
        let n = word.len();
        let lone_e = last.len() == 1 && word[last.start] == 'e';
        let ending: String = word[last.start..].iter().collect();
        let mute = lone_e
            && match ending.as_str() {
                "e" | "es" => true,
                // verb plural -ent; -ment is almost always sounded
                "ent" => last.start > 0 && word[last.start - 1] != 'm',
                _ => false,
            };
        if mute && last.end <= n {
            out.pop();
        }
    }
    out
}

pub(crate) fn onset(cluster: &[char]) -> usize {
    romance_onset(cluster, DIGRAPHS, INSEPARABLE)
}

impl WordRules for French {
    fn syllable_starts(&self, word: &[char], lexicon: &Lexicon) -> Vec<usize> {
        let ruled = || starts_from_nuclei(word, &nuclei(word, self.final_e), onset);
        lexicon_starts(word, lexicon, ruled).unwrap_or_else(ruled)
    }
}
