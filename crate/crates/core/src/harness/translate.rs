use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{parallel_map, write_json, HarnessError, HypKey, HypothesisSet, RunConfig};
use crate::data::{Dataset, LyricLine, SongEntry};
use crate::lang::LanguageTag;
use crate::pipeline::{PipelineError, PipelineVariant, TranslationTask, Translator};
use crate::providers::{GenerationProvider, MediaAttachment, MediaKind, ProviderClient, TraceStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Translated,
    Failed,
    /// Not attempted (e.g. the source text is not available).
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineOutcome {
    #[serde(flatten)]
    pub key: HypKey,
    pub status: OutcomeStatus,
    pub required_count: Option<usize>,
    pub translation: Option<String>,
    pub achieved_count: Option<usize>,
    pub constraint_met: Option<bool>,
    pub attempts: Option<u32>,
    pub reason: Option<String>,
    #[serde(skip)]
    provider_failure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslateOutcome {
    pub run_dir: PathBuf,
    pub variant: PipelineVariant,
    pub hypotheses: HypothesisSet,
    pub lines: Vec<LineOutcome>,
}

impl TranslateOutcome {
    pub fn count(&self, status: OutcomeStatus) -> usize {
        self.lines.iter().filter(|l| l.status == status).count()
    }

    /// Fails when every attempted line hit a provider error, or when the
    /// failed fraction of attempted lines exceeds `threshold`.
    pub fn check(&self, threshold: f64) -> Result<(), HarnessError> {
        let attempted: Vec<&LineOutcome> = self.lines.iter().filter(|l| l.status != OutcomeStatus::Skipped).collect();
        let failed: Vec<&&LineOutcome> = attempted.iter().filter(|l| l.status == OutcomeStatus::Failed).collect();
        if attempted.is_empty() {
            return Ok(());
        }
        if failed.len() == attempted.len() && failed.iter().all(|l| l.provider_failure) {
            let reason = failed[0].reason.clone().unwrap_or_default();
            return Err(HarnessError::Provider(format!("every request failed; first error: {reason}")));
        }
        if failed.len() as f64 > threshold * attempted.len() as f64 {
            return Err(HarnessError::Threshold {
                failed: failed.len(),
                total: attempted.len(),
                threshold,
            });
        }
        Ok(())
    }
}

/// Media references for a line: the song's media as both an audio and a
/// video clip, cut to the line's span widened by `margin_ms`.
pub fn line_media(entry: &SongEntry, line: &LyricLine, margin_ms: u64) -> Vec<MediaAttachment> {
    let (Some(url), Some(span)) = (&entry.media_url, line.time_span) else {
        return Vec::new();
    };
    let span = Some(span.widened(margin_ms));
    let video = MediaAttachment::new(MediaKind::Video, url.clone(), span);
    let audio = MediaAttachment {
        content_type: Some(video.mime_type().replacen("video/", "audio/", 1)),
        ..MediaAttachment::new(MediaKind::Audio, url.clone(), span)
    };
    vec![audio, video]
}

struct Job<'d> {
    key: HypKey,
    entry: &'d SongEntry,
    line: &'d LyricLine,
}

fn jobs<'d>(dataset: &'d Dataset, source: LanguageTag, targets: &[LanguageTag]) -> Vec<Job<'d>> {
    let mut out = Vec::new();
    for (song_id, entries) in &dataset.songs {
        let Some(entry) = entries.get(&source) else { continue };
        for &target in targets {
            for (section, line) in entry.lines() {
                out.push(Job {
                    key: HypKey {
                        song_id: song_id.clone(),
                        language: target,
                        section: section.index,
                        line: line.index,
                    },
                    entry,
                    line,
                });
            }
        }
    }
    out
}

/// Translates every source line into each target language and writes
/// `hypotheses.json`, `results.json`, `traces.jsonl` and `config.json` into
/// `run_dir`. Per-line failures are recorded, not raised; use
/// [`TranslateOutcome::check`] to apply the failure threshold.
pub fn translate(
    config: &RunConfig,
    dataset: &Dataset,
    provider: &dyn GenerationProvider,
    variant: PipelineVariant,
    run_dir: &Path,
) -> Result<TranslateOutcome, HarnessError> {
    if config.target_langs.is_empty() {
        log::warn!("no target languages selected; nothing to translate");
    }
    let trace = TraceStore::open(run_dir.join("traces.jsonl")).map_err(|e| HarnessError::Config(e.to_string()))?;
    let client = ProviderClient::new(provider)
        .with_retry(config.retry)
        .with_max_in_flight(config.parallelism)
        .with_trace(&trace);
    let syllabifier = config.syllabifier()?;
    let templates = config.templates()?;
    let translator = Translator {
        client: &client,
        syllabifier: &syllabifier,
        templates: &templates,
        config: config.generation_config(),
        policy: config.normalization,
        options: config.loop_options(),
    };
    let work = jobs(dataset, config.source_lang, &config.target_langs);
    let lines = parallel_map(&work, config.parallelism, |job| {
        let mut outcome = LineOutcome {
            key: job.key.clone(),
            status: OutcomeStatus::Skipped,
            required_count: None,
            translation: None,
            achieved_count: None,
            constraint_met: None,
            attempts: None,
            reason: None,
            provider_failure: false,
        };
        let Some(text) = job.line.resolved_text.as_deref() else {
            outcome.reason = Some("source text unresolved".into());
            return outcome;
        };
        let task = match job.line.syllable_count {
            Some(c) => TranslationTask::with_count(text, config.source_lang, job.key.language, c),
            None => TranslationTask::new(text, config.source_lang, job.key.language, &syllabifier, &config.normalization),
        };
        let task = match task {
            Ok(t) => t.with_media(line_media(job.entry, job.line, config.media_margin_ms)),
            Err(e) => {
                outcome.reason = Some(e.to_string());
                return outcome;
            }
        };
        outcome.required_count = Some(task.required_count);
        let task_id = format!("{}#{}", job.key.task_id(), variant.slug());
        match translator.translate_line(&task, &variant, &task_id) {
            Ok(r) => {
                outcome.status = OutcomeStatus::Translated;
                outcome.translation = Some(r.translation);
                outcome.achieved_count = Some(r.achieved_count);
                outcome.constraint_met = Some(r.constraint_met);
                outcome.attempts = Some(r.attempts);
            }
            Err(e) => {
                outcome.status = OutcomeStatus::Failed;
                outcome.provider_failure = matches!(e, PipelineError::Provider(_));
                if let PipelineError::Unparseable { attempts, .. } = &e {
                    outcome.attempts = Some(*attempts);
                }
                outcome.reason = Some(e.to_string());
            }
        }
        outcome
    });

    let mut hypotheses = HypothesisSet::new(client.provider_id());
    for l in &lines {
        if let (OutcomeStatus::Translated, Some(t)) = (l.status, &l.translation) {
            hypotheses.entries.insert(l.key.clone(), t.clone());
        }
    }
    write_json(&run_dir.join("config.json"), config)?;
    write_json(&run_dir.join("hypotheses.json"), &hypotheses)?;
    write_json(&run_dir.join("results.json"), &lines)?;
    Ok(TranslateOutcome {
        run_dir: run_dir.to_path_buf(),
        variant,
        hypotheses,
        lines,
    })
}
