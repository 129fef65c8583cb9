//! Korean: one syllable per precomposed Hangul block.

pub const SYLLABLE_FIRST: char = '\u{AC00}';
pub const SYLLABLE_LAST: char = '\u{D7A3}';

pub fn is_syllable_block(c: char) -> bool {
    (SYLLABLE_FIRST..=SYLLABLE_LAST).contains(&c)
}

/// One unit per block; any other non-space character rides along with the
/// neighbouring block.
pub(crate) fn segment(text: &str) -> Vec<String> {
    let mut units: Vec<String> = Vec::new();
    let mut pending = String::new();
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        if is_syllable_block(c) {
            let mut unit = std::mem::take(&mut pending);
            unit.push(c);
            units.push(unit);
        } else {
            match units.last_mut() {
                Some(unit) => unit.push(c),
                None => pending.push(c),
            }
        }
    }
    units
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_unit_per_block() {
        assert_eq!(segment("나비"), vec!["나", "비"]);
        assert_eq!(segment("나비가 날아와"), vec!["나", "비", "가", "날", "아", "와"]);
    }

    #[test]
    fn non_hangul_attaches() {
        assert_eq!(segment("(나) 비!"), vec!["(나)", "비!"]);
        assert!(segment("OK").is_empty());
    }
}
