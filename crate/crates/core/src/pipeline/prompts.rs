use std::path::Path;

use super::{PipelineError, PipelineVariant, PromptStyle, TranslationTask};

pub const SEGMENTATION_HEADER: &str = "Identify the Core Lyric and Perform Syllable Segmentation";
pub const TARGET_LIST_HEADER: &str = "Generate the Target Language Translation Syllable List";
pub const REFINE_HEADER: &str = "Iterate and Refine the Translation";
pub const FINAL_HEADER: &str = "Generate the Final Translation";
/// Instruction sentence that asks for a written syllable list.
pub const LIST_FORMAT_INSTRUCTION: &str = "write it down in the following format";

/// Prompt templates; the builtin set can be replaced from a directory
/// holding files with the same names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplates {
    pub chain_of_thought: String,
    pub constrained: String,
    pub correction: String,
}

const COT_FILE: &str = "cot.v1.txt";
const CONSTRAINED_FILE: &str = "constrained.v1.txt";
const CORRECTION_FILE: &str = "correction.v1.txt";

impl Default for PromptTemplates {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PromptTemplates {
    pub fn builtin() -> Self {
        Self {
            chain_of_thought: include_str!("../../assets/prompts/cot.v1.txt").to_string(),
            constrained: include_str!("../../assets/prompts/constrained.v1.txt").to_string(),
            correction: include_str!("../../assets/prompts/correction.v1.txt").to_string(),
        }
    }

    pub fn shared() -> &'static PromptTemplates {
        static SHARED: std::sync::OnceLock<PromptTemplates> = std::sync::OnceLock::new();
        SHARED.get_or_init(PromptTemplates::builtin)
    }

    /// Overrides builtin templates with any of `cot.v1.txt`,
    /// `constrained.v1.txt`, `correction.v1.txt` found in `dir`.
    pub fn with_dir(mut self, dir: &Path) -> Result<Self, PipelineError> {
        for (name, slot) in [
            (COT_FILE, &mut self.chain_of_thought),
            (CONSTRAINED_FILE, &mut self.constrained),
            (CORRECTION_FILE, &mut self.correction),
        ] {
            let path = dir.join(name);
            if path.exists() {
                *slot = std::fs::read_to_string(&path)
                    .map_err(|e| PipelineError::Template(format!("{}: {e}", path.display())))?;
            }
        }
        Ok(self)
    }

    pub fn build(&self, task: &TranslationTask, variant: &PipelineVariant) -> String {
        let template = match variant.style {
            PromptStyle::ChainOfThought => &self.chain_of_thought,
            PromptStyle::SyllableConstrained => &self.constrained,
        };
        let audio = variant.modalities.audio;
        let video = variant.modalities.video;
        let expanded = expand_conditions(template, |cond| match cond {
            "audio" => audio,
            "video" => video,
            "list" => variant.use_syllable_list,
            "refine" => variant.use_refine,
            _ => false,
        });
        let count = task.required_count.to_string();
        substitute(
            &expanded,
            &[
                ("source_lang", task.source_lang.name()),
                ("target_lang", task.target_lang.name()),
                ("syllable_count", &count),
                ("source_text", &task.source_text),
            ],
        )
    }

    pub fn correction(&self, problem: &str, task: &TranslationTask) -> String {
        let expanded = expand_conditions(&self.correction, |_| false);
        let count = task.required_count.to_string();
        substitute(
            &expanded,
            &[
                ("problem", problem),
                ("syllable_count", &count),
                ("target_lang", task.target_lang.name()),
            ],
        )
    }
}

/// Drops comment lines and lines whose conditions fail, strips the condition
/// prefixes and numbers `{n}` markers in order.
fn expand_conditions(template: &str, holds: impl Fn(&str) -> bool) -> String {
    let mut out = Vec::new();
    let mut step = 0;
    for line in template.lines() {
        if line.starts_with('#') {
            continue;
        }
        let mut body = line;
        if let Some(rest) = line.strip_prefix('[') {
            if let Some((conds, tail)) = rest.split_once(']') {
                let is_condition = !conds.is_empty()
                    && conds
                        .split(',')
                        .all(|c| c.trim_start_matches('!').chars().all(|ch| ch.is_ascii_lowercase()));
                if is_condition {
                    let keep = conds.split(',').all(|c| match c.strip_prefix('!') {
                        Some(neg) => !holds(neg),
                        None => holds(c),
                    });
                    if !keep {
                        continue;
                    }
                    body = tail;
                }
            }
        }
        if body.contains("{n}") {
            step += 1;
            out.push(body.replace("{n}", &step.to_string()));
        } else {
            out.push(body.to_string());
        }
    }
    let mut text = out.join("\n");
    text.push('\n');
    text
}

/// Replaces `{name}` placeholders in one pass, so substituted values are
/// never themselves expanded. Unknown braces are left alone.
fn substitute(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after
            .find('}')
            .and_then(|close| values.iter().find(|(k, _)| *k == &after[..close]).map(|(_, v)| (close, v)));
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}
