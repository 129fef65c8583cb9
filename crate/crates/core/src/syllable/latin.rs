//! Word-level syllabification shared by the space-delimited Latin-script
//! languages. Each language supplies the nucleus finder and the onset rule;
//! this module turns those into units that cover the original text.

use std::ops::Range;

use super::lexicon::{Lexicon, LexiconEntry};

/// Language-specific syllabification of a single word.
pub(crate) trait WordRules {
    /// Start offsets of each syllable in `word`, which is lower-cased, starts
    /// and ends with a letter and may contain internal apostrophes.
    fn syllable_starts(&self, word: &[char], lexicon: &Lexicon) -> Vec<usize>;
}

pub(crate) fn is_letter(c: char) -> bool {
    c.is_alphabetic() || ('\u{300}'..='\u{36f}').contains(&c)
}

pub(crate) fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02bc}')
}

pub(crate) fn is_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}')
}

pub(crate) fn lower(c: char) -> char {
    c.to_lowercase().next().unwrap_or(c)
}

/// Syllable starts for a lexicon hit, or `None` if the word is not listed.
pub(crate) fn lexicon_starts(
    word: &[char],
    lexicon: &Lexicon,
    fallback: impl Fn() -> Vec<usize>,
) -> Option<Vec<usize>> {
    let key: String = word.iter().collect();
    match lexicon.get(&key)? {
        LexiconEntry::Syllables(parts) => {
            let mut starts = Vec::with_capacity(parts.len());
            let mut at = 0;
            for part in parts {
                starts.push(at);
                at += part.chars().count();
            }
            Some(starts)
        }
        LexiconEntry::Count(n) => {
            let ruled = fallback();
            if ruled.len() == *n {
                Some(ruled)
            } else {
                Some(even_starts(word.len(), *n))
            }
        }
    }
}

/// `n` syllables of near-equal length over `len` characters.
pub(crate) fn even_starts(len: usize, n: usize) -> Vec<usize> {
    let n = n.clamp(1, len.max(1));
    (0..n).map(|k| k * len / n).collect()
}

/// Places syllable boundaries between consecutive nuclei. `onset` receives
/// the consonant cluster between two nuclei and returns how many of its
/// trailing characters open the next syllable.
pub(crate) fn starts_from_nuclei(
    word: &[char],
    nuclei: &[Range<usize>],
    onset: impl Fn(&[char]) -> usize,
) -> Vec<usize> {
    if nuclei.is_empty() {
        return Vec::new();
    }
    let mut starts = vec![0];
    for pair in nuclei.windows(2) {
        let cluster = &word[pair[0].end..pair[1].start];
        let take = onset(cluster).min(cluster.len());
        starts.push(pair[1].start - take);
    }
    starts
}

/// Maximal runs of positions accepted by `is_vowel`.
pub(crate) fn vowel_runs(len: usize, is_vowel: impl Fn(usize) -> bool) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < len {
        if is_vowel(i) {
            let start = i;
            while i < len && is_vowel(i) {
                i += 1;
            }
            runs.push(start..i);
        } else {
            i += 1;
        }
    }
    runs
}

/// Splits a consonant cluster into units, merging the given digraphs and
/// attaching apostrophes to the preceding unit.
pub(crate) fn consonant_units(cluster: &[char], digraphs: &[&str]) -> Vec<Range<usize>> {
    let mut units: Vec<Range<usize>> = Vec::new();
    let mut i = 0;
    while i < cluster.len() {
        if is_apostrophe(cluster[i]) {
            match units.last_mut() {
                Some(last) => last.end = i + 1,
                None => units.push(i..i + 1),
            }
            i += 1;
            continue;
        }
        let digraph = digraphs.iter().find(|d| {
            let d: Vec<char> = d.chars().collect();
            cluster[i..].starts_with(&d)
        });
        let step = digraph.map_or(1, |d| d.chars().count());
        units.push(i..i + step);
        i += step;
    }
    units
}

/// Onset rule for Romance clusters: a single consonant opens the next
/// syllable, and so does an inseparable obstruent + liquid pair.
pub(crate) fn romance_onset(cluster: &[char], digraphs: &[&str], inseparable: &[&str]) -> usize {
    let units = consonant_units(cluster, digraphs);
    match units.len() {
        0 => 0,
        1 => cluster.len() - units[0].start,
        n => {
            let pair: String = cluster[units[n - 2].start..units[n - 1].end].iter().collect();
            let first = units[if inseparable.contains(&pair.as_str()) { n - 2 } else { n - 1 }].start;
            cluster.len() - first
        }
    }
}

/// Splits whitespace-delimited text into syllable units using `rules`.
///
/// Punctuation stays attached to the unit it touches; hyphenated compounds
/// are syllabified piece by piece.
pub(crate) fn segment_words(text: &str, rules: &dyn WordRules, lexicon: &Lexicon) -> Vec<String> {
    let mut units: Vec<String> = Vec::new();
    let mut pending = String::new();
    for token in text.split_whitespace() {
        for piece in hyphen_pieces(token) {
            let chars: Vec<char> = piece.chars().collect();
            let first = chars.iter().position(|&c| is_letter(c));
            let last = chars.iter().rposition(|&c| is_letter(c));
            let (Some(a), Some(b)) = (first, last) else {
                match units.last_mut() {
                    Some(unit) => unit.push_str(piece),
                    None => pending.push_str(piece),
                }
                continue;
            };
            let word: Vec<char> = chars[a..=b].iter().map(|&c| lower(c)).collect();
            let mut starts = rules.syllable_starts(&word, lexicon);
            if starts.is_empty() {
                starts.push(0);
            }
            for (k, &start) in starts.iter().enumerate() {
                let from = if k == 0 { 0 } else { a + start };
                let to = starts.get(k + 1).map_or(chars.len(), |&next| a + next);
                let mut unit: String = std::mem::take(&mut pending);
                unit.extend(&chars[from..to]);
                units.push(unit);
            }
        }
    }
    units
}

fn hyphen_pieces(token: &str) -> Vec<&str> {
    let mut pieces = Vec::new();
    let mut start = 0;
    for (i, c) in token.char_indices() {
        if is_hyphen(c) {
            let end = i + c.len_utf8();
            pieces.push(&token[start..end]);
            start = end;
        }
    }
    if start < token.len() {
        pieces.push(&token[start..]);
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyphen_pieces_keep_hyphen_on_the_left() {
        assert_eq!(hyphen_pieces("vingt-et-un"), vec!["vingt-", "et-", "un"]);
        assert_eq!(hyphen_pieces("-"), vec!["-"]);
        assert_eq!(hyphen_pieces("word"), vec!["word"]);
    }

    #[test]
    fn consonant_units_merge_digraphs_and_apostrophes() {
        let c: Vec<char> = "rrd'h".chars().collect();
        assert_eq!(consonant_units(&c, &["rr"]), vec![0..2, 2..4, 4..5]);
    }

    #[test]
    fn even_starts_cover_the_word() {
        assert_eq!(even_starts(6, 3), vec![0, 2, 4]);
        assert_eq!(even_starts(2, 5), vec![0, 1]);
    }
}
