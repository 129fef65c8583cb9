//! The staged, syllable-constrained translation loop: prompt construction,
//! reply parsing, local validation and bounded re-prompting.

mod parse;
mod prompts;
mod translate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lang::LanguageTag;
use crate::providers::{MediaAttachment, MediaKind, ProviderError};
use crate::syllable::{NormalizationPolicy, Syllabifier};

pub use parse::{final_payload, parse_stages, syllable_lists, RefinementRound, StageTrace};
pub use prompts::{
    PromptTemplates, FINAL_HEADER, LIST_FORMAT_INSTRUCTION, REFINE_HEADER, SEGMENTATION_HEADER, TARGET_LIST_HEADER,
};
pub use translate::{validate, AttemptRecord, LoopOptions, TranslationResult, Translator, Validation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("reply has no final {{\"translation\": ...}} payload")]
    MissingFinalAnswer { trace: Box<StageTrace> },
    #[error("no parseable answer after {attempts} attempts")]
    Unparseable { attempts: u32, traces: Vec<StageTrace> },
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid variant: {0}")]
    InvalidVariant(String),
    #[error("prompt template: {0}")]
    Template(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

/// Parses a reply, failing when it carries no final-answer payload. The
/// error keeps the partial trace.
pub fn parse_trace(raw: &str) -> Result<StageTrace, PipelineError> {
    let trace = parse_stages(raw);
    if trace.final_translation.is_none() {
        return Err(PipelineError::MissingFinalAnswer { trace: Box::new(trace) });
    }
    Ok(trace)
}

/// Input modalities; text is always present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Modalities {
    pub audio: bool,
    pub video: bool,
}

impl Modalities {
    pub const TEXT: Modalities = Modalities { audio: false, video: false };
    pub const AUDIO: Modalities = Modalities { audio: true, video: false };
    pub const VIDEO: Modalities = Modalities { audio: false, video: true };
    pub const ALL: Modalities = Modalities { audio: true, video: true };
    /// The modality ablation grid: T, T+V, T+A, T+A+V.
    pub const GRID: [Modalities; 4] = [Self::TEXT, Self::VIDEO, Self::AUDIO, Self::ALL];

    pub fn allows(&self, kind: MediaKind) -> bool {
        match kind {
            MediaKind::Audio => self.audio,
            MediaKind::Video => self.video,
        }
    }

    pub fn intersect(self, other: Modalities) -> Modalities {
        Modalities {
            audio: self.audio && other.audio,
            video: self.video && other.video,
        }
    }

    pub fn union(self, other: Modalities) -> Modalities {
        Modalities {
            audio: self.audio || other.audio,
            video: self.video || other.video,
        }
    }

    /// Modalities covered by a set of attachments.
    pub fn available(media: &[MediaAttachment]) -> Modalities {
        Modalities {
            audio: media.iter().any(|m| m.kind == MediaKind::Audio),
            video: media.iter().any(|m| m.kind == MediaKind::Video),
        }
    }

    pub fn contains(self, other: Modalities) -> bool {
        self.intersect(other) == other
    }
}

impl fmt::Display for Modalities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("T")?;
        if self.audio {
            f.write_str("+A")?;
        }
        if self.video {
            f.write_str("+V")?;
        }
        Ok(())
    }
}

impl FromStr for Modalities {
    type Err = PipelineError;

    /// Accepts `T`, `T+A`, `T+V`, `T+A+V` (any order, `+` or `,` separated,
    /// letters or full words).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut m = Modalities::TEXT;
        let mut text = false;
        for part in s.split(['+', ',']).map(|p| p.trim().to_ascii_lowercase()) {
            match part.as_str() {
                "t" | "text" => text = true,
                "a" | "audio" => m.audio = true,
                "v" | "video" => m.video = true,
                _ => return Err(PipelineError::InvalidVariant(format!("unknown modality `{part}` in `{s}`"))),
            }
        }
        if !text {
            return Err(PipelineError::InvalidVariant(format!("`{s}` must include text (T)")));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptStyle {
    /// The four-step reasoning prompt.
    #[default]
    ChainOfThought,
    /// The single-shot baseline that only states the syllable count.
    SyllableConstrained,
}

/// Which steps and inputs a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PipelineVariant {
    pub style: PromptStyle,
    pub use_syllable_list: bool,
    pub use_refine: bool,
    pub modalities: Modalities,
}

impl Default for PipelineVariant {
    fn default() -> Self {
        Self::full()
    }
}

impl PipelineVariant {
    pub fn full() -> Self {
        Self {
            style: PromptStyle::ChainOfThought,
            use_syllable_list: true,
            use_refine: true,
            modalities: Modalities::ALL,
        }
    }

    pub fn constrained() -> Self {
        Self {
            style: PromptStyle::SyllableConstrained,
            use_syllable_list: false,
            use_refine: false,
            modalities: Modalities::TEXT,
        }
    }

    /// The (syllable list, refine) ablation grid in ✗✗, ✗✓, ✓✗, ✓✓ order.
    pub fn stage_grid(modalities: Modalities) -> [PipelineVariant; 4] {
        [(false, false), (false, true), (true, false), (true, true)].map(|(list, refine)| PipelineVariant {
            style: PromptStyle::ChainOfThought,
            use_syllable_list: list,
            use_refine: refine,
            modalities,
        })
    }

    /// Ablation label: syllable list then refine, ✓ or ✗ each.
    pub fn stage_label(&self) -> String {
        let mark = |b: bool| if b { '✓' } else { '✗' };
        format!("{}{}", mark(self.use_syllable_list), mark(self.use_refine))
    }

    /// Short, filesystem-safe name.
    pub fn slug(&self) -> String {
        match self.style {
            PromptStyle::SyllableConstrained => "constrained".to_string(),
            PromptStyle::ChainOfThought => format!(
                "cot-list{}-refine{}-{}",
                u8::from(self.use_syllable_list),
                u8::from(self.use_refine),
                self.modalities.to_string().replace('+', "").to_lowercase()
            ),
        }
    }
}

impl FromStr for PipelineVariant {
    type Err = PipelineError;

    /// `full`, `no-list`, `no-refine`, `bare`, `constrained`, or a stage
    /// label such as `✓✗`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (list, refine) = match s.trim() {
            "constrained" => return Ok(Self::constrained()),
            "full" | "✓✓" => (true, true),
            "no-refine" | "✓✗" => (true, false),
            "no-list" | "✗✓" => (false, true),
            "bare" | "✗✗" => (false, false),
            other => return Err(PipelineError::InvalidVariant(format!("unknown variant `{other}`"))),
        };
        Ok(Self {
            use_syllable_list: list,
            use_refine: refine,
            ..Self::full()
        })
    }
}

/// One line to translate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationTask {
    pub source_text: String,
    pub source_lang: LanguageTag,
    pub target_lang: LanguageTag,
    pub required_count: usize,
    #[serde(default)]
    pub media: Vec<MediaAttachment>,
}

impl TranslationTask {
    /// Counts the source syllables locally to get the required count.
    pub fn new(
        source_text: &str,
        source_lang: LanguageTag,
        target_lang: LanguageTag,
        syllabifier: &Syllabifier,
        policy: &NormalizationPolicy,
    ) -> Result<Self, PipelineError> {
        let count = syllabifier
            .count(source_lang, source_text, policy)
            .map_err(|e| PipelineError::InvalidTask(e.to_string()))?;
        Self::with_count(source_text, source_lang, target_lang, count)
    }

    /// Uses a stored count instead of counting.
    pub fn with_count(
        source_text: &str,
        source_lang: LanguageTag,
        target_lang: LanguageTag,
        required_count: usize,
    ) -> Result<Self, PipelineError> {
        if source_text.trim().is_empty() {
            return Err(PipelineError::InvalidTask("empty source text".into()));
        }
        if source_lang == target_lang {
            return Err(PipelineError::InvalidTask(format!("source and target are both {source_lang}")));
        }
        if required_count == 0 {
            return Err(PipelineError::InvalidTask("source line has no syllables".into()));
        }
        Ok(Self {
            source_text: source_text.to_string(),
            source_lang,
            target_lang,
            required_count,
            media: Vec::new(),
        })
    }

    pub fn with_media(mut self, media: Vec<MediaAttachment>) -> Self {
        self.media = media;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modality_strings() {
        for (s, m) in [("T", Modalities::TEXT), ("T+V", Modalities::VIDEO), ("T+A", Modalities::AUDIO), ("T+A+V", Modalities::ALL)] {
            assert_eq!(s.parse::<Modalities>().unwrap(), m);
            assert_eq!(m.to_string(), s);
        }
        assert_eq!("text,video,audio".parse::<Modalities>().unwrap(), Modalities::ALL);
        assert!("A+V".parse::<Modalities>().is_err());
        assert!("T+X".parse::<Modalities>().is_err());
    }

    #[test]
    fn stage_labels() {
        let labels: Vec<String> = PipelineVariant::stage_grid(Modalities::ALL).iter().map(|v| v.stage_label()).collect();
        assert_eq!(labels, ["✗✗", "✗✓", "✓✗", "✓✓"]);
        for v in PipelineVariant::stage_grid(Modalities::ALL) {
            assert_eq!(v.stage_label().parse::<PipelineVariant>().unwrap(), v);
        }
        assert_eq!("constrained".parse::<PipelineVariant>().unwrap(), PipelineVariant::constrained());
        assert_eq!(PipelineVariant::full().slug(), "cot-list1-refine1-tav");
    }

    #[test]
    fn task_invariants() {
        let s = Syllabifier::shared();
        let p = NormalizationPolicy::default();
        let t = TranslationTask::new("And there's a butterfly", LanguageTag::En, LanguageTag::Ko, s, &p).unwrap();
        assert_eq!(t.required_count, 6);
        assert!(TranslationTask::new("hi", LanguageTag::En, LanguageTag::En, s, &p).is_err());
        assert!(TranslationTask::new("  ", LanguageTag::En, LanguageTag::Ko, s, &p).is_err());
        assert!(TranslationTask::with_count("!!", LanguageTag::En, LanguageTag::Ko, 0).is_err());
    }

    #[test]
    fn parse_trace_requires_payload() {
        match parse_trace("[\"a\"] no payload") {
            Err(PipelineError::MissingFinalAnswer { trace }) => {
                assert_eq!(trace.source_segmentation, Some(vec!["a".to_string()]))
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
