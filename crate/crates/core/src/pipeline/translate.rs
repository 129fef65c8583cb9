use serde::{Deserialize, Serialize};

use super::{parse_trace, Modalities, PipelineError, PipelineVariant, PromptTemplates, StageTrace, TranslationTask};
use crate::providers::{GenerationConfig, GenerationRequest, ProviderClient, Role};
use crate::syllable::{NormalizationPolicy, Syllabifier};

/// Local checks on a candidate translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub achieved_count: usize,
    pub constraint_met: bool,
    pub non_empty: bool,
    pub single_line: bool,
}

impl Validation {
    pub fn accepted(&self) -> bool {
        self.constraint_met && self.non_empty && self.single_line
    }
}

/// Counts the candidate locally; never fails (an uncountable text counts 0).
pub fn validate(
    text: &str,
    task: &TranslationTask,
    syllabifier: &Syllabifier,
    policy: &NormalizationPolicy,
) -> Validation {
    let trimmed = text.trim();
    let achieved_count = if trimmed.is_empty() {
        0
    } else {
        syllabifier.count(task.target_lang, trimmed, policy).unwrap_or(0)
    };
    Validation {
        achieved_count,
        constraint_met: achieved_count == task.required_count,
        non_empty: !trimmed.is_empty(),
        single_line: !trimmed.contains('\n'),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoopOptions {
    /// Extra prompts after the first; total attempts are this plus one.
    pub max_reprompts: u32,
    /// Attach the media again on corrective turns.
    pub resend_media: bool,
}

impl Default for LoopOptions {
    fn default() -> Self {
        Self {
            max_reprompts: 2,
            resend_media: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: u32,
    pub translation: Option<String>,
    pub validation: Option<Validation>,
    pub trace: StageTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationResult {
    pub task: TranslationTask,
    /// The variant actually run, after dropping unavailable modalities.
    pub variant: PipelineVariant,
    pub translation: String,
    pub achieved_count: usize,
    pub constraint_met: bool,
    /// Attempts made, not the index of the chosen one.
    pub attempts: u32,
    /// Trace of the chosen attempt.
    pub trace: StageTrace,
    pub history: Vec<AttemptRecord>,
}

/// Runs the generate / parse / validate / re-prompt loop.
pub struct Translator<'a> {
    pub client: &'a ProviderClient<'a>,
    pub syllabifier: &'a Syllabifier,
    pub templates: &'a PromptTemplates,
    pub config: GenerationConfig,
    pub policy: NormalizationPolicy,
    pub options: LoopOptions,
}

impl<'a> Translator<'a> {
    pub fn new(client: &'a ProviderClient<'a>) -> Self {
        Self {
            client,
            syllabifier: Syllabifier::shared(),
            templates: PromptTemplates::shared(),
            config: GenerationConfig::default(),
            policy: NormalizationPolicy::default(),
            options: LoopOptions::default(),
        }
    }

    pub fn with_options(mut self, options: LoopOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_config(mut self, config: GenerationConfig) -> Self {
        self.config = config;
        self
    }

    pub fn build_prompt(&self, task: &TranslationTask, variant: &PipelineVariant) -> String {
        self.templates.build(task, variant)
    }

    pub fn translate_line(
        &self,
        task: &TranslationTask,
        variant: &PipelineVariant,
        task_id: &str,
    ) -> Result<TranslationResult, PipelineError> {
        let available = Modalities::available(&task.media);
        let effective = PipelineVariant {
            modalities: variant.modalities.intersect(available),
            ..*variant
        };
        if effective.modalities != variant.modalities {
            log::debug!(
                "{task_id}: requested {} but only {} media available",
                variant.modalities,
                effective.modalities
            );
        }
        let media: Vec<_> = task
            .media
            .iter()
            .filter(|m| effective.modalities.allows(m.kind))
            .cloned()
            .collect();
        let mut request =
            GenerationRequest::new(task_id, self.build_prompt(task, &effective), self.config).with_media(media);

        let total = self.options.max_reprompts + 1;
        let mut history: Vec<AttemptRecord> = Vec::new();
        for attempt in 1..=total {
            let reply = self.client.generate(&request)?;
            let (record, problem) = match parse_trace(&reply) {
                Ok(trace) => {
                    let text = trace.final_translation.clone().unwrap_or_default();
                    let v = validate(&text, task, self.syllabifier, &self.policy);
                    let problem = (!v.accepted()).then(|| describe_problem(&text, &v, task));
                    (
                        AttemptRecord {
                            attempt,
                            translation: Some(text),
                            validation: Some(v),
                            trace,
                        },
                        problem,
                    )
                }
                Err(PipelineError::MissingFinalAnswer { trace }) => (
                    AttemptRecord {
                        attempt,
                        translation: None,
                        validation: None,
                        trace: *trace,
                    },
                    Some("Your reply did not contain the final JSON answer.".to_string()),
                ),
                Err(other) => return Err(other),
            };
            history.push(record);
            let Some(problem) = problem else { break };
            if attempt < total {
                request.push_turn(Role::Model, reply);
                request.push_turn(Role::User, self.templates.correction(&problem, task));
                if !self.options.resend_media {
                    request.media.clear();
                }
            }
        }
        select_best(task, effective, history)
    }
}

fn describe_problem(text: &str, v: &super::Validation, task: &TranslationTask) -> String {
    if !v.non_empty {
        return "Your final translation was empty.".to_string();
    }
    if !v.single_line {
        return "Your final translation spans several lines; it must be a single line.".to_string();
    }
    format!(
        "Your translation \"{}\" has {} syllables, but the original lyric has {}.",
        text.trim(),
        v.achieved_count,
        task.required_count
    )
}

/// Prefers an accepted attempt, then the smallest count difference, then the
/// earliest.
fn select_best(
    task: &TranslationTask,
    variant: PipelineVariant,
    history: Vec<AttemptRecord>,
) -> Result<TranslationResult, PipelineError> {
    let attempts = history.len() as u32;
    let best = history
        .iter()
        .filter_map(|r| r.validation.map(|v| (r, v)))
        .min_by_key(|(r, v)| (!v.accepted(), v.achieved_count.abs_diff(task.required_count), r.attempt));
    let Some((best, v)) = best else {
        return Err(PipelineError::Unparseable {
            attempts,
            traces: history.into_iter().map(|r| r.trace).collect(),
        });
    };
    Ok(TranslationResult {
        task: task.clone(),
        variant,
        translation: best.translation.clone().unwrap_or_default(),
        achieved_count: v.achieved_count,
        constraint_met: v.constraint_met,
        attempts,
        trace: best.trace.clone(),
        history: history.clone(),
    })
}
