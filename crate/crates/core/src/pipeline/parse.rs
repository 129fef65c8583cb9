use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One candidate syllable list written while refining.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementRound {
    pub syllables: Vec<String>,
    pub count: usize,
}

/// What could be recovered from a model reply.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StageTrace {
    pub source_segmentation: Option<Vec<String>>,
    pub target_syllable_list: Option<Vec<String>>,
    pub refinement_rounds: Vec<RefinementRound>,
    pub final_translation: Option<String>,
    pub raw_text: String,
}

/// Parses a bracketed list of double-quoted strings starting at `start`
/// (which must point at `[`). Returns the items and the byte index just
/// past the closing bracket.
fn quoted_list_at(text: &str, start: usize) -> Option<(Vec<String>, usize)> {
    let bytes = text.as_bytes();
    let skip_ws = |mut i: usize| {
        while i < bytes.len() && (bytes[i] as char).is_ascii_whitespace() {
            i += 1;
        }
        i
    };
    let mut i = skip_ws(start + 1);
    let mut items = Vec::new();
    loop {
        if bytes.get(i) != Some(&b'"') {
            return None;
        }
        let mut de = serde_json::Deserializer::from_str(&text[i..]).into_iter::<String>();
        let item = de.next()?.ok()?;
        i += de.byte_offset();
        items.push(item);
        i = skip_ws(i);
        match bytes.get(i) {
            Some(b',') => i = skip_ws(i + 1),
            Some(b']') => return Some((items, i + 1)),
            _ => return None,
        }
    }
}

/// All bracketed, comma-separated lists of quoted items, in order.
pub fn syllable_lists(text: &str) -> Vec<Vec<String>> {
    let mut lists = Vec::new();
    let mut i = 0;
    while let Some(offset) = text[i..].find('[') {
        let start = i + offset;
        match quoted_list_at(text, start) {
            Some((items, end)) => {
                lists.push(items);
                i = end;
            }
            None => i = start + 1,
        }
    }
    lists
}

/// The last `{"translation": "..."}` object that parses as JSON.
pub fn final_payload(text: &str) -> Option<String> {
    let mut last = None;
    for (i, _) in text.match_indices('{') {
        let mut de = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
        if let Some(Ok(Value::Object(obj))) = de.next() {
            if let Some(Value::String(t)) = obj.get("translation") {
                last = Some(t.clone());
            }
        }
    }
    last
}

fn is_slice_of(part: &[String], whole: &[String]) -> bool {
    !part.is_empty() && whole.windows(part.len()).any(|w| w == part)
}

/// Splits a reply into its stages. Lists are assigned by position: the
/// first is the source segmentation, the second the initial target list and
/// every later one a refinement round. A list that repeats the previous one,
/// or quotes a contiguous part of it, is not a new round.
pub fn parse_stages(raw: &str) -> StageTrace {
    let mut lists = syllable_lists(raw).into_iter();
    let source_segmentation = lists.next();
    let target_syllable_list = lists.next();
    let mut refinement_rounds: Vec<RefinementRound> = Vec::new();
    for list in lists {
        let prev = refinement_rounds.last().map(|r| &r.syllables).or(target_syllable_list.as_ref());
        if prev.is_some_and(|p| is_slice_of(&list, p)) {
            continue;
        }
        refinement_rounds.push(RefinementRound {
            count: list.len(),
            syllables: list,
        });
    }
    StageTrace {
        source_segmentation,
        target_syllable_list,
        refinement_rounds,
        final_translation: final_payload(raw),
        raw_text: raw.to_string(),
    }
}
