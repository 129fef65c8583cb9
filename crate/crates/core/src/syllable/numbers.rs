//! Cardinal number expansion, used so that digits contribute the syllables
//! they are sung with.

use crate::lang::LanguageTag;

use super::SyllableError;

/// Largest magnitude accepted by [`expand_number`].
pub const MAX_MAGNITUDE: i64 = 999_999;

/// Spells `n` as cardinal words in the orthography of `lang`.
pub fn expand_number(lang: LanguageTag, n: i64) -> Result<String, SyllableError> {
    if n.unsigned_abs() > MAX_MAGNITUDE as u64 {
        return Err(SyllableError::UnsupportedNumber(n.to_string()));
    }
    let magnitude = n.unsigned_abs() as u32;
    let words = match lang {
        LanguageTag::En => english(magnitude),
        LanguageTag::Es => spanish(magnitude),
        LanguageTag::Fr => french(magnitude),
        LanguageTag::Ko => korean(magnitude),
        LanguageTag::Ja => japanese(magnitude),
    };
    if n < 0 {
        let minus = match lang {
            LanguageTag::En => "minus ",
            LanguageTag::Es => "menos ",
            LanguageTag::Fr => "moins ",
            LanguageTag::Ko => "마이너스 ",
            LanguageTag::Ja => "まいなす",
        };
        Ok(format!("{minus}{words}"))
    } else {
        Ok(words)
    }
}

const EN_SMALL: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const EN_TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

fn english_below_100(n: u32) -> String {
    if n < 20 {
        EN_SMALL[n as usize].to_string()
    } else if n.is_multiple_of(10) {
        EN_TENS[(n / 10) as usize].to_string()
    } else {
        format!("{}-{}", EN_TENS[(n / 10) as usize], EN_SMALL[(n % 10) as usize])
    }
}

fn english_below_1000(n: u32) -> String {
    let (hundreds, rest) = (n / 100, n % 100);
    match (hundreds, rest) {
        (0, r) => english_below_100(r),
        (h, 0) => format!("{} hundred", EN_SMALL[h as usize]),
        (h, r) => format!("{} hundred and {}", EN_SMALL[h as usize], english_below_100(r)),
    }
}

fn english(n: u32) -> String {
    let (thousands, rest) = (n / 1000, n % 1000);
    if thousands == 0 {
        return english_below_1000(rest);
    }
    let head = format!("{} thousand", english_below_1000(thousands));
    match rest {
        0 => head,
        r if r < 100 => format!("{head} and {}", english_below_100(r)),
        r => format!("{head} {}", english_below_1000(r)),
    }
}

const ES_SMALL: [&str; 30] = [
    "cero", "uno", "dos", "tres", "cuatro", "cinco", "seis", "siete", "ocho", "nueve", "diez",
    "once", "doce", "trece", "catorce", "quince", "dieciséis", "diecisiete", "dieciocho",
    "diecinueve", "veinte", "veintiuno", "veintidós", "veintitrés", "veinticuatro",
    "veinticinco", "veintiséis", "veintisiete", "veintiocho", "veintinueve",
];
const ES_TENS: [&str; 10] = [
    "", "", "", "treinta", "cuarenta", "cincuenta", "sesenta", "setenta", "ochenta", "noventa",
];
const ES_HUNDREDS: [&str; 10] = [
    "", "ciento", "doscientos", "trescientos", "cuatrocientos", "quinientos", "seiscientos",
    "setecientos", "ochocientos", "novecientos",
];

fn spanish_below_100(n: u32) -> String {
    if n < 30 {
        ES_SMALL[n as usize].to_string()
    } else if n.is_multiple_of(10) {
        ES_TENS[(n / 10) as usize].to_string()
    } else {
        format!("{} y {}", ES_TENS[(n / 10) as usize], ES_SMALL[(n % 10) as usize])
    }
}

fn spanish_below_1000(n: u32) -> String {
    match (n / 100, n % 100) {
        (0, r) => spanish_below_100(r),
        (1, 0) => "cien".to_string(),
        (h, 0) => ES_HUNDREDS[h as usize].to_string(),
        (h, r) => format!("{} {}", ES_HUNDREDS[h as usize], spanish_below_100(r)),
    }
}

fn spanish(n: u32) -> String {
    let (thousands, rest) = (n / 1000, n % 1000);
    let head = match thousands {
        0 => return spanish_below_1000(rest),
        1 => "mil".to_string(),
        t => {
            // "uno" apocopates before a noun-like "mil": veintiún mil, ciento un mil.
            let mut words = spanish_below_1000(t);
            if words.ends_with("veintiuno") {
                words.truncate(words.len() - "veintiuno".len());
                words.push_str("veintiún");
            } else if words.ends_with("uno") {
                words.truncate(words.len() - 1);
            }
            format!("{words} mil")
        }
    };
    if rest == 0 {
        head
    } else {
        format!("{head} {}", spanish_below_1000(rest))
    }
}

const FR_SMALL: [&str; 20] = [
    "zéro", "un", "deux", "trois", "quatre", "cinq", "six", "sept", "huit", "neuf", "dix", "onze",
    "douze", "treize", "quatorze", "quinze", "seize", "dix-sept", "dix-huit", "dix-neuf",
];
const FR_TENS: [&str; 7] = ["", "", "vingt", "trente", "quarante", "cinquante", "soixante"];

// Hyphenated throughout, following the reformed spelling.
fn french_below_100(n: u32) -> String {
    match n {
        0..=19 => FR_SMALL[n as usize].to_string(),
        20..=69 => {
            let (t, u) = (n / 10, n % 10);
            match u {
                0 => FR_TENS[t as usize].to_string(),
                1 => format!("{}-et-un", FR_TENS[t as usize]),
                _ => format!("{}-{}", FR_TENS[t as usize], FR_SMALL[u as usize]),
            }
        }
        70..=79 => match n - 60 {
            11 => "soixante-et-onze".to_string(),
            r => format!("soixante-{}", FR_SMALL[r as usize]),
        },
        80 => "quatre-vingts".to_string(),
        _ => format!("quatre-vingt-{}", FR_SMALL[(n - 80) as usize]),
    }
}

fn french_below_1000(n: u32) -> String {
    match (n / 100, n % 100) {
        (0, r) => french_below_100(r),
        (1, 0) => "cent".to_string(),
        (1, r) => format!("cent-{}", french_below_100(r)),
        (h, 0) => format!("{}-cents", FR_SMALL[h as usize]),
        (h, r) => format!("{}-cent-{}", FR_SMALL[h as usize], french_below_100(r)),
    }
}

fn french(n: u32) -> String {
    let (thousands, rest) = (n / 1000, n % 1000);
    let head = match thousands {
        0 => return french_below_1000(rest),
        1 => "mille".to_string(),
        t => {
            // "vingts" and "cents" lose their plural before "mille".
            let words = french_below_1000(t);
            let words = words
                .strip_suffix("vingts")
                .map(|w| format!("{w}vingt"))
                .or_else(|| words.strip_suffix("cents").map(|w| format!("{w}cent")))
                .unwrap_or(words);
            format!("{words}-mille")
        }
    };
    if rest == 0 {
        head
    } else {
        format!("{head}-{}", french_below_1000(rest))
    }
}

const KO_DIGITS: [&str; 10] = ["영", "일", "이", "삼", "사", "오", "육", "칠", "팔", "구"];

// Sino-Korean reading; a leading 일 is dropped before 십, 백, 천 and 만.
fn korean_below_10000(n: u32) -> String {
    let mut out = String::new();
    for (unit, name) in [(1000, "천"), (100, "백"), (10, "십")] {
        let digit = (n / unit) % 10;
        if digit > 1 {
            out.push_str(KO_DIGITS[digit as usize]);
        }
        if digit > 0 {
            out.push_str(name);
        }
    }
    let ones = n % 10;
    if ones > 0 {
        out.push_str(KO_DIGITS[ones as usize]);
    }
    out
}

fn korean(n: u32) -> String {
    if n == 0 {
        return KO_DIGITS[0].to_string();
    }
    let (man, rest) = (n / 10_000, n % 10_000);
    let mut out = String::new();
    if man > 0 {
        if man > 1 {
            out.push_str(&korean_below_10000(man));
        }
        out.push('만');
        if rest > 0 {
            out.push(' ');
        }
    }
    out.push_str(&korean_below_10000(rest));
    out
}

const JA_DIGITS: [&str; 10] = [
    "ぜろ", "いち", "に", "さん", "よん", "ご", "ろく", "なな", "はち", "きゅう",
];

fn japanese_hundreds(d: u32) -> &'static str {
    match d {
        1 => "ひゃく",
        3 => "さんびゃく",
        6 => "ろっぴゃく",
        8 => "はっぴゃく",
        _ => "",
    }
}

fn japanese_thousands(d: u32) -> &'static str {
    match d {
        1 => "せん",
        3 => "さんぜん",
        8 => "はっせん",
        _ => "",
    }
}

fn japanese_below_10000(n: u32) -> String {
    let mut out = String::new();
    let th = (n / 1000) % 10;
    if th > 0 {
        match japanese_thousands(th) {
            "" => {
                out.push_str(JA_DIGITS[th as usize]);
                out.push_str("せん");
            }
            special => out.push_str(special),
        }
    }
    let h = (n / 100) % 10;
    if h > 0 {
        match japanese_hundreds(h) {
            "" => {
                out.push_str(JA_DIGITS[h as usize]);
                out.push_str("ひゃく");
            }
            special => out.push_str(special),
        }
    }
    let t = (n / 10) % 10;
    if t > 1 {
        out.push_str(JA_DIGITS[t as usize]);
    }
    if t > 0 {
        out.push_str("じゅう");
    }
    let ones = n % 10;
    if ones > 0 {
        out.push_str(JA_DIGITS[ones as usize]);
    }
    out
}

fn japanese(n: u32) -> String {
    if n == 0 {
        return JA_DIGITS[0].to_string();
    }
    let (man, rest) = (n / 10_000, n % 10_000);
    let mut out = String::new();
    if man > 0 {
        if man == 1 {
            out.push_str("いち");
        } else {
            out.push_str(&japanese_below_10000(man));
        }
        out.push_str("まん");
    }
    out.push_str(&japanese_below_10000(rest));
    out
}
