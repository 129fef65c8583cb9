/// Levenshtein distance over arbitrary symbols: unit-cost insertion,
/// deletion and substitution, no transpositions.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    // keep the shorter sequence along the row
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, x) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(x != y);
            row[j + 1] = (diag + cost).min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[short.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Vec<&str> {
        s.split(' ').filter(|t| !t.is_empty()).collect()
    }

    #[test]
    fn textbook_cases() {
        assert_eq!(levenshtein(&sym("k ɪ t ə n"), &sym("s ɪ t ɪ ŋ")), 3);
        assert_eq!(levenshtein(&sym(""), &sym("a b c")), 3);
        assert_eq!(levenshtein(&sym("a b c"), &sym("")), 3);
        assert_eq!(levenshtein(&sym("a b"), &sym("a b")), 0);
        assert_eq!(levenshtein(&sym("a b"), &sym("b a")), 2);
    }

    #[test]
    fn multi_codepoint_symbols_are_one_unit() {
        assert_eq!(levenshtein(&["tʃ", "a"], &["t", "a"]), 1);
        assert_eq!(levenshtein(&["oʊ"], &["o"]), 1);
    }
}
