//! Shared inputs for the benchmarks under `benches/`.

use singable::LanguageTag;

/// A few representative lines per language.
pub fn corpus() -> Vec<(LanguageTag, &'static str)> {
    vec![
        (LanguageTag::En, "Remember me, don't let it make you cry"),
        (LanguageTag::En, "Three months of winter coolness and awesome holidays"),
        (LanguageTag::Es, "Recuérdame, hoy me tengo que ir, mi amor"),
        (LanguageTag::Fr, "Souviens-toi de moi, même si je dois partir"),
        (LanguageTag::Ko, "날 잊지 마 슬퍼하지는 마"),
        (LanguageTag::Ja, "忘れないで 離れていても"),
    ]
}

/// Pseudo-random symbol sequence of length `n` over `alphabet` symbols.
pub fn symbols(n: usize, alphabet: u32, seed: u32) -> Vec<u32> {
    let mut x = seed.wrapping_mul(2_654_435_761).max(1);
    (0..n)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 17;
            x ^= x << 5;
            x % alphabet
        })
        .collect()
}
