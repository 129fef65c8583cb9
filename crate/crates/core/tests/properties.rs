use proptest::prelude::*;

use singable::data::{default_tokenizer, encode_line, match_line, parse_dataset, serialize_dataset};
use singable::metrics::{cosine_similarity, syllable_count_distance, syllable_error};
use singable::phonetics::levenshtein;
use singable::syllable::count_syllables;
use singable::{LanguageTag, NormalizationPolicy, SyllableErrorParams};

mod common;

fn hangul() -> impl Strategy<Value = char> {
    (0xAC00u32..=0xD7A3).prop_map(|c| char::from_u32(c).unwrap())
}

proptest! {
    #[test]
    fn se_is_zero_only_on_match(c_ref in 1usize..60, c_pred in 0usize..60, beta in 1.0f64..4.0) {
        let p = SyllableErrorParams::new(beta).unwrap();
        let se = syllable_error(c_ref, c_pred, &p).unwrap();
        prop_assert!(se >= 0.0);
        prop_assert_eq!(se == 0.0, c_ref == c_pred);
        // over-counting by k never costs less than under-counting by k
        if c_ref > c_pred {
            let k = c_ref - c_pred;
            prop_assert!(syllable_error(c_ref, c_ref + k, &p).unwrap() >= se);
        }
    }

    #[test]
    fn scd_is_symmetric_and_bounded(a in 1usize..200, b in 1usize..200) {
        let d = syllable_count_distance(a, b).unwrap();
        prop_assert_eq!(d, syllable_count_distance(b, a).unwrap());
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d == 0.0, a == b);
    }

    #[test]
    fn levenshtein_bounds(a in prop::collection::vec(0u8..5, 0..25), b in prop::collection::vec(0u8..5, 0..25)) {
        let d = levenshtein(&a, &b);
        prop_assert!(d >= a.len().abs_diff(b.len()));
        prop_assert!(d <= a.len().max(b.len()));
        prop_assert_eq!(d, levenshtein(&b, &a));
        prop_assert_eq!(d == 0, a == b);
    }

    #[test]
    fn levenshtein_triangle(
        a in prop::collection::vec(0u8..4, 0..15),
        b in prop::collection::vec(0u8..4, 0..15),
        c in prop::collection::vec(0u8..4, 0..15),
    ) {
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
    }

    #[test]
    fn cosine_is_clamped_and_scale_free(
        v in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..32),
        lambda in 0.01f64..100.0,
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        prop_assume!(a.iter().any(|x| *x != 0.0) && b.iter().any(|x| *x != 0.0));
        let c = cosine_similarity(&a, &b).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c));
        let scaled: Vec<f64> = a.iter().map(|x| x * lambda).collect();
        prop_assert!((cosine_similarity(&scaled, &b).unwrap() - c).abs() < 1e-9);
        prop_assert!((cosine_similarity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_hangul_block_is_one_syllable(words in prop::collection::vec(prop::collection::vec(hangul(), 1..6), 1..6)) {
        let text = words.iter().map(|w| w.iter().collect::<String>()).collect::<Vec<_>>().join(" ");
        let blocks = words.iter().map(Vec::len).sum::<usize>();
        prop_assert_eq!(count_syllables(LanguageTag::Ko, &text, &NormalizationPolicy::default()).unwrap(), blocks);
    }

    #[test]
    fn kana_without_small_marks_counts_per_char(s in "[あいうえおかきくけこさしすせそなにぬねのまみむめも]{1,20}") {
        prop_assert_eq!(count_syllables(LanguageTag::Ja, &s, &NormalizationPolicy::default()).unwrap(), s.chars().count());
    }

    #[test]
    fn encoded_lines_match_themselves(words in prop::collection::vec("[a-zA-Z']{1,8}", 1..10)) {
        let text = words.join(" ");
        let tok = default_tokenizer(LanguageTag::En);
        let rep = encode_line(LanguageTag::En, &text, tok).unwrap();
        prop_assert!(match_line(&rep, &text, LanguageTag::En, tok));
        let padded = format!("  {text}\t");
        prop_assert!(match_line(&rep, &padded, LanguageTag::En, tok));
        if words.len() > 1 {
            let dropped = words[1..].join(" ");
            prop_assert!(!match_line(&rep, &dropped, LanguageTag::En, tok));
        }
        let added = format!("{text} la");
        prop_assert!(!match_line(&rep, &added, LanguageTag::En, tok));
    }

    #[test]
    fn dataset_round_trips(lines in prop::collection::vec("[a-z]{1,6}( [a-z]{1,6}){0,4}", 1..6), media in any::<bool>()) {
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let ds = common::dataset(vec![("s", vec![common::entry(LanguageTag::En, &[&refs], media)])]);
        let bytes = serialize_dataset(&ds);
        prop_assert_eq!(parse_dataset(&bytes).unwrap(), ds);
    }
}
