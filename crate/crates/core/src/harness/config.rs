use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::lang::LanguageTag;
use crate::metrics::{AggregationMode, Component, SyllableErrorParams};
use crate::phonetics::RuleBook;
use crate::pipeline::{LoopOptions, Modalities, PipelineVariant, PromptTemplates};
use crate::providers::http::{ChatCompletionsProvider, GeminiProvider, HttpEmbeddingProvider};
use crate::providers::mock::{KeyedMockProvider, MockScript};
use crate::providers::{
    EmbeddingProvider, GenerationConfig, GenerationProvider, HashingEmbedder, RetryPolicy,
};
use crate::syllable::{NormalizationPolicy, Syllabifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    /// Keyed mock driven by `mock_script`.
    #[default]
    Mock,
    Gemini,
    /// Any OpenAI-compatible chat endpoint.
    Chat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    /// Deterministic character n-gram hashing.
    #[default]
    Hashing,
    /// OpenAI-compatible embeddings endpoint.
    Http,
    None,
}

/// Everything that determines a run. Loaded from TOML and/or assembled from
/// command-line flags; field names are the TOML keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: PathBuf,
    /// Directory of `<song-id>/<LANG>.txt` lyric files to re-attach.
    pub lyrics_dir: Option<PathBuf>,
    pub source_lang: LanguageTag,
    pub target_langs: Vec<LanguageTag>,
    /// `full`, `no-list`, `no-refine`, `bare`, `constrained` or a ✓/✗ label.
    pub variant: String,
    /// `T`, `T+A`, `T+V` or `T+A+V`.
    pub modalities: String,
    pub provider: ProviderKind,
    pub mock_script: Option<PathBuf>,
    /// Sampling parameters; defaults follow the provider.
    pub generation: Option<GenerationConfig>,
    pub retry: RetryPolicy,
    pub embedding: EmbeddingKind,
    pub embedding_model: String,
    pub components: Vec<Component>,
    pub beta: f64,
    pub aggregation: AggregationMode,
    pub out_dir: PathBuf,
    pub parallelism: usize,
    pub max_reprompts: u32,
    pub resend_media: bool,
    /// Context added before and after each line's clip, in milliseconds.
    pub media_margin_ms: u64,
    /// Fraction of failed lines above which a translate run fails.
    pub failure_threshold: f64,
    pub prompts_dir: Option<PathBuf>,
    pub lexicon_dir: Option<PathBuf>,
    pub g2p_dir: Option<PathBuf>,
    pub normalization: NormalizationPolicy,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: PathBuf::new(),
            lyrics_dir: None,
            source_lang: LanguageTag::En,
            target_langs: Vec::new(),
            variant: "full".into(),
            modalities: "T+A+V".into(),
            provider: ProviderKind::Mock,
            mock_script: None,
            generation: None,
            retry: RetryPolicy::default(),
            embedding: EmbeddingKind::Hashing,
            embedding_model: String::new(),
            components: Component::ALL.to_vec(),
            beta: 2.0,
            aggregation: AggregationMode::Lines,
            out_dir: PathBuf::from("runs"),
            parallelism: 4,
            max_reprompts: LoopOptions::default().max_reprompts,
            resend_media: true,
            media_margin_ms: 2000,
            failure_threshold: 0.5,
            prompts_dir: None,
            lexicon_dir: None,
            g2p_dir: None,
            normalization: NormalizationPolicy::default(),
        }
    }
}

fn config_error(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(e.to_string())
}

fn must_exist(what: &str, path: &Path) -> Result<(), HarnessError> {
    if path.exists() {
        Ok(())
    } else {
        Err(HarnessError::Config(format!("{what} {} does not exist", path.display())))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(config_error)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn pipeline_variant(&self) -> Result<PipelineVariant, HarnessError> {
        let mut v: PipelineVariant = self.variant.parse().map_err(config_error)?;
        if v != PipelineVariant::constrained() {
            v.modalities = self.modalities.parse::<Modalities>().map_err(config_error)?;
        }
        Ok(v)
    }

    pub fn params(&self) -> Result<SyllableErrorParams, HarnessError> {
        SyllableErrorParams::new(self.beta).map_err(config_error)
    }

    pub fn loop_options(&self) -> LoopOptions {
        LoopOptions {
            max_reprompts: self.max_reprompts,
            resend_media: self.resend_media,
        }
    }

    pub fn generation_config(&self) -> GenerationConfig {
        self.generation.unwrap_or(match self.provider {
            ProviderKind::Chat => GenerationConfig::qwen(),
            _ => GenerationConfig::gemini(),
        })
    }

    /// Checks paths and ranges. Provider reachability is not checked here.
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.validate_scoring()?;
        if self.provider == ProviderKind::Mock {
            match &self.mock_script {
                Some(p) => must_exist("mock_script", p)?,
                None => return Err(config_error("the mock provider needs a mock_script")),
            }
        }
        self.pipeline_variant()?;
        if !(0.0..=1.0).contains(&self.failure_threshold) {
            return Err(config_error("failure_threshold must be within [0, 1]"));
        }
        self.generation_config().validate().map_err(config_error)
    }

    /// The subset of [`RunConfig::validate`] that evaluation needs.
    pub fn validate_scoring(&self) -> Result<(), HarnessError> {
        must_exist("dataset", &self.dataset)?;
        for (what, p) in [
            ("lyrics_dir", &self.lyrics_dir),
            ("prompts_dir", &self.prompts_dir),
            ("lexicon_dir", &self.lexicon_dir),
            ("g2p_dir", &self.g2p_dir),
        ] {
            if let Some(p) = p {
                must_exist(what, p)?;
            }
        }
        self.params()?;
        if self.parallelism == 0 {
            return Err(config_error("parallelism must be at least 1"));
        }
        if self.target_langs.contains(&self.source_lang) {
            return Err(config_error(format!("{} is both source and target", self.source_lang)));
        }
        Ok(())
    }

    /// Digest of everything that affects results (not the output root or
    /// the degree of parallelism), plus the dataset bytes.
    pub fn digest(&self) -> Result<String, HarnessError> {
        let mut canonical = self.clone();
        canonical.out_dir = PathBuf::new();
        canonical.parallelism = 1;
        let json = serde_json::to_vec(&canonical).map_err(config_error)?;
        let dataset = std::fs::read(&self.dataset).unwrap_or_default();
        let script = self
            .mock_script
            .as_ref()
            .and_then(|p| std::fs::read(p).ok())
            .unwrap_or_default();
        Ok(super::sha256_hex(&[&json, &dataset, &script]))
    }

    pub fn generation_provider(&self) -> Result<Box<dyn GenerationProvider>, HarnessError> {
        let provider: Box<dyn GenerationProvider> = match self.provider {
            ProviderKind::Mock => {
                let path = self
                    .mock_script
                    .as_ref()
                    .ok_or_else(|| config_error("the mock provider needs a mock_script"))?;
                Box::new(KeyedMockProvider::new(MockScript::load(path).map_err(config_error)?))
            }
            ProviderKind::Gemini => Box::new(GeminiProvider::from_env().map_err(config_error)?),
            ProviderKind::Chat => Box::new(ChatCompletionsProvider::from_env().map_err(config_error)?),
        };
        Ok(provider)
    }

    pub fn embedding_provider(&self) -> Result<Option<Box<dyn EmbeddingProvider>>, HarnessError> {
        Ok(match self.embedding {
            EmbeddingKind::Hashing => Some(Box::new(HashingEmbedder::default())),
            EmbeddingKind::Http => Some(Box::new(HttpEmbeddingProvider::from_env().map_err(config_error)?)),
            EmbeddingKind::None => None,
        })
    }

    pub fn syllabifier(&self) -> Result<Syllabifier, HarnessError> {
        let base = Syllabifier::builtin();
        match &self.lexicon_dir {
            Some(dir) => base.with_lexicon_dir(dir).map_err(config_error),
            None => Ok(base),
        }
    }

    pub fn rules(&self) -> Result<RuleBook, HarnessError> {
        let base = RuleBook::builtin();
        match &self.g2p_dir {
            Some(dir) => base.with_dir(dir).map_err(config_error),
            None => Ok(base),
        }
    }

    pub fn templates(&self) -> Result<PromptTemplates, HarnessError> {
        let base = PromptTemplates::builtin();
        match &self.prompts_dir {
            Some(dir) => base.with_dir(dir).map_err(config_error),
            None => Ok(base),
        }
    }
}
