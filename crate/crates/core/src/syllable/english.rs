//! English: vowel-group counting with silent-e handling and a lexicon for
//! irregular words.

use std::ops::Range;

use super::latin::{is_apostrophe, lexicon_starts, starts_from_nuclei, vowel_runs, WordRules};
use super::lexicon::Lexicon;

pub(crate) struct English;

fn plain_vowel(c: char) -> bool {
    matches!(
        c,
        'a' | 'e' | 'i' | 'o' | 'u' | 'à' | 'á' | 'â' | 'ä' | 'è' | 'é' | 'ê' | 'ë' | 'ì' | 'í'
            | 'î' | 'ï' | 'ò' | 'ó' | 'ô' | 'ö' | 'ù' | 'ú' | 'û' | 'ü'
    )
}

/// `y` is a vowel except word-initially before a vowel or between vowels.
fn is_vowel_at(word: &[char], i: usize) -> bool {
    let c = word[i];
    if c != 'y' {
        return plain_vowel(c);
    }
    let next_vowel = word.get(i + 1).is_some_and(|&n| plain_vowel(n));
    let prev_vowel = i > 0 && plain_vowel(word[i - 1]);
    !(next_vowel && (i == 0 || prev_vowel))
}

fn is_consonant_at(word: &[char], i: usize) -> bool {
    word[i].is_alphabetic() && !is_vowel_at(word, i)
}

/// Vowel groups that carry a syllable, after dropping silent endings.
pub(crate) fn nuclei(word: &[char]) -> Vec<Range<usize>> {
    let mut groups = vowel_runs(word.len(), |i| is_vowel_at(word, i));
    if groups.len() < 2 {
        return groups;
    }
    let last = groups[groups.len() - 1].clone();
    let n = word.len();
    let lone_e = last.len() == 1 && word[last.start] == 'e' && last.start > 0;
    if lone_e {
        let before = last.start - 1;
        let consonant_le = word[before] == 'l' && before > 0 && is_consonant_at(word, before - 1);
        let silent = if last.end == n {
            // final e: "make", "smile"; but "table" keeps consonant + le
            is_consonant_at(word, before) && !consonant_le
        } else if last.end + 1 == n && word[n - 1] == 'd' {
            // -ed: "loved"; but "wanted", "needed", "hundred"
            let consonant_r = word[before] == 'r' && before > 0 && is_consonant_at(word, before - 1);
            is_consonant_at(word, before) && !matches!(word[before], 't' | 'd') && !consonant_r
        } else if last.end + 1 == n && word[n - 1] == 's' {
            // -es: "makes"; but "horses", "wishes", "faces", "tables"
            let sibilant = matches!(word[before], 's' | 'x' | 'z' | 'c' | 'g')
                || (word[before] == 'h' && before > 0 && matches!(word[before - 1], 'c' | 's'));
            is_consonant_at(word, before) && !sibilant && !consonant_le
        } else {
            false
        };
        if silent {
            groups.pop();
        }
    }
    groups
}

/// Clusters that may open an English syllable.
const ONSETS: &[&str] = &[
    "bl", "br", "cl", "cr", "dr", "fl", "fr", "gl", "gr", "pl", "pr", "tr", "th", "ch", "sh", "ph",
    "wh", "wr", "qu", "thr", "chr", "shr", "str", "spr", "scr", "spl",
];

pub(crate) fn onset(cluster: &[char]) -> usize {
    let n = cluster.len();
    let tail = |k: usize| -> String { cluster[n - k..].iter().collect() };
    match n {
        0 => 0,
        1 if cluster[0] == 'x' => 0,
        1 => 1,
        _ => {
            if n >= 3 && ONSETS.contains(&tail(3).as_str()) {
                3
            } else if ONSETS.contains(&tail(2).as_str()) {
                2
            } else if matches!(tail(2).as_str(), "ck" | "ng") || cluster[n - 1] == 'x' {
                0
            } else {
                1
            }
        }
    }
}

fn plain_starts(word: &[char], lexicon: &Lexicon) -> Vec<usize> {
    let ruled = || starts_from_nuclei(word, &nuclei(word), onset);
    lexicon_starts(word, lexicon, ruled).unwrap_or_else(ruled)
}

impl WordRules for English {
    fn syllable_starts(&self, word: &[char], lexicon: &Lexicon) -> Vec<usize> {
        if let Some(hit) = lexicon_starts(word, lexicon, || self.rule_starts(word, lexicon)) {
            return hit;
        }
        self.rule_starts(word, lexicon)
    }
}

impl English {
    fn rule_starts(&self, word: &[char], lexicon: &Lexicon) -> Vec<usize> {
        let Some(apos) = word.iter().position(|&c| is_apostrophe(c)) else {
            return plain_starts(word, lexicon);
        };
        // Contractions: the clitic adds no vowel, except "n't" after a
        // consonant ("could-n't", "does-n't").
        let stem = &word[..apos];
        let suffix = &word[apos + 1..];
        let syllabic_nt = suffix == ['t']
            && stem.len() >= 2
            && stem[stem.len() - 1] == 'n'
            && !is_vowel_at(stem, stem.len() - 2);
        if syllabic_nt {
            let inner = &stem[..stem.len() - 1];
            let mut starts = plain_starts(inner, lexicon);
            starts.push(inner.len());
            starts
        } else if stem.is_empty() {
            vec![0]
        } else {
            plain_starts(stem, lexicon)
        }
    }
}
