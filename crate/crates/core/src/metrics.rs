//! Syllabic, phonetic and semantic line scores and their corpus aggregates.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::lang::LanguageTag;
use crate::phonetics::{phonetic_distance, RuleBook};
use crate::providers::{embed, EmbeddingProvider, EmbeddingRequest};
use crate::syllable::{NormalizationPolicy, Syllabifier};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("reference count must be at least 1 (got c_ref={c_ref}, c_pred={c_pred})")]
    UndefinedReference { c_ref: usize, c_pred: usize },
    #[error("beta must be a finite number >= 1, got {0}")]
    InvalidBeta(f64),
    #[error("embedding is the zero vector")]
    DegenerateEmbedding,
    #[error("embedding dimensions differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("nothing to aggregate")]
    EmptyInput,
}

/// Over-count penalty for the syllable error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyllableErrorParams {
    beta: f64,
}

impl SyllableErrorParams {
    pub fn new(beta: f64) -> Result<Self, MetricsError> {
        if !beta.is_finite() || beta < 1.0 {
            return Err(MetricsError::InvalidBeta(beta));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for SyllableErrorParams {
    fn default() -> Self {
        Self { beta: 2.0 }
    }
}

/// `c_ref - c_pred` when the prediction is short, `beta * (c_pred - c_ref)`
/// when it is long.
pub fn syllable_error(c_ref: usize, c_pred: usize, params: &SyllableErrorParams) -> Result<f64, MetricsError> {
    if c_ref == 0 {
        return Err(MetricsError::UndefinedReference { c_ref, c_pred });
    }
    Ok(if c_ref >= c_pred {
        (c_ref - c_pred) as f64
    } else {
        params.beta * (c_pred - c_ref) as f64
    })
}

/// Symmetric relative count difference: the mean of |Δ|/c_ref and |Δ|/c_pred.
pub fn syllable_count_distance(c_ref: usize, c_pred: usize) -> Result<f64, MetricsError> {
    if c_ref == 0 || c_pred == 0 {
        return Err(MetricsError::UndefinedReference { c_ref, c_pred });
    }
    let diff = c_ref.abs_diff(c_pred) as f64;
    Ok(0.5 * (diff / c_ref as f64 + diff / c_pred as f64))
}

/// Cosine of the angle between two embeddings, clamped to [-1, 1].
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 || !na.is_finite() || !nb.is_finite() {
        return Err(MetricsError::DegenerateEmbedding);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Which ground truth a prediction is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// The English original.
    OriginalEn,
    /// The official singable translation in the target language.
    Dubbed,
}

impl ReferenceKind {
    pub const ALL: [ReferenceKind; 2] = [ReferenceKind::OriginalEn, ReferenceKind::Dubbed];

    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceKind::OriginalEn => "original_en",
            ReferenceKind::Dubbed => "dubbed",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ReferenceKind::OriginalEn => "English lyrics vs translation",
            ReferenceKind::Dubbed => "Dubbed lyrics vs translation",
        }
    }
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Syllabic,
    Semantic,
    Phonetic,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Syllabic, Component::Semantic, Component::Phonetic];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyllabicScore {
    pub c_ref: usize,
    pub c_pred: usize,
    pub se: f64,
    pub scd: f64,
    pub mismatch: bool,
}

impl SyllabicScore {
    pub fn new(c_ref: usize, c_pred: usize, params: &SyllableErrorParams) -> Result<Self, MetricsError> {
        Ok(Self {
            c_ref,
            c_pred,
            se: syllable_error(c_ref, c_pred, params)?,
            scd: syllable_count_distance(c_ref, c_pred)?,
            mismatch: c_ref != c_pred,
        })
    }
}

/// Scores of one predicted line against one reference. Components that were
/// not requested stay `None`; components that failed are `None` with the
/// reason in `errors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineScore {
    /// Language of the prediction.
    pub language: LanguageTag,
    pub reference_language: LanguageTag,
    pub reference_kind: ReferenceKind,
    pub syllabic: Option<SyllabicScore>,
    pub semantic: Option<f64>,
    pub phonetic: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub errors: BTreeMap<Component, String>,
}

/// Everything needed to score lines: syllable rules, G2P tables and an
/// optional embedding provider.
#[derive(Clone, Copy)]
pub struct Scorer<'a> {
    pub syllabifier: &'a Syllabifier,
    pub rules: &'a RuleBook,
    pub embedder: Option<&'a dyn EmbeddingProvider>,
    pub embedding_model: &'a str,
    pub params: SyllableErrorParams,
    pub policy: NormalizationPolicy,
}

impl<'a> Scorer<'a> {
    /// Builtin tables, no embedder, β = 2.
    pub fn builtin() -> Scorer<'static> {
        Scorer {
            syllabifier: Syllabifier::shared(),
            rules: RuleBook::shared(),
            embedder: None,
            embedding_model: "",
            params: SyllableErrorParams::default(),
            policy: NormalizationPolicy::default(),
        }
    }

    pub fn with_embedder(mut self, embedder: &'a dyn EmbeddingProvider) -> Self {
        self.embedder = Some(embedder);
        self
    }

    pub fn with_params(mut self, params: SyllableErrorParams) -> Self {
        self.params = params;
        self
    }

    #[allow(clippy::too_many_arguments)]
    pub fn score_line(
        &self,
        gt: &str,
        pred: &str,
        lang_gt: LanguageTag,
        lang_pred: LanguageTag,
        kind: ReferenceKind,
        components: &[Component],
    ) -> LineScore {
        self.score_line_counted(gt, None, pred, lang_gt, lang_pred, kind, components)
    }

    /// As [`Scorer::score_line`], with an optional stored reference count
    /// that takes precedence over counting `gt`.
    #[allow(clippy::too_many_arguments)]
    pub fn score_line_counted(
        &self,
        gt: &str,
        gt_count: Option<usize>,
        pred: &str,
        lang_gt: LanguageTag,
        lang_pred: LanguageTag,
        kind: ReferenceKind,
        components: &[Component],
    ) -> LineScore {
        let mut score = LineScore {
            language: lang_pred,
            reference_language: lang_gt,
            reference_kind: kind,
            syllabic: None,
            semantic: None,
            phonetic: None,
            errors: BTreeMap::new(),
        };
        if components.contains(&Component::Syllabic) {
            let result = (|| -> Result<SyllabicScore, String> {
                let c_ref = match gt_count {
                    Some(c) => c,
                    None => self.syllabifier.count(lang_gt, gt, &self.policy).map_err(|e| e.to_string())?,
                };
                let c_pred = self.syllabifier.count(lang_pred, pred, &self.policy).map_err(|e| e.to_string())?;
                SyllabicScore::new(c_ref, c_pred, &self.params).map_err(|e| e.to_string())
            })();
            match result {
                Ok(s) => score.syllabic = Some(s),
                Err(e) => {
                    score.errors.insert(Component::Syllabic, e);
                }
            }
        }
        if components.contains(&Component::Phonetic) {
            match self.phonetic(gt, pred, lang_gt, lang_pred) {
                Ok(d) => score.phonetic = Some(d),
                Err(e) => {
                    score.errors.insert(Component::Phonetic, e);
                }
            }
        }
        if components.contains(&Component::Semantic) {
            match self.semantic(gt, pred) {
                Ok(s) => score.semantic = Some(s),
                Err(e) => {
                    score.errors.insert(Component::Semantic, e);
                }
            }
        }
        score
    }

    fn phonetic(&self, gt: &str, pred: &str, lang_gt: LanguageTag, lang_pred: LanguageTag) -> Result<usize, String> {
        let gt = self.syllabifier.normalize(lang_gt, gt, &self.policy).map_err(|e| e.to_string())?;
        let pred = self.syllabifier.normalize(lang_pred, pred, &self.policy).map_err(|e| e.to_string())?;
        phonetic_distance(lang_gt, &gt, lang_pred, &pred, self.rules).map_err(|e| e.to_string())
    }

    fn semantic(&self, gt: &str, pred: &str) -> Result<f64, String> {
        let embedder = self.embedder.ok_or("no embedding provider configured")?;
        let request = EmbeddingRequest::new(vec![gt.to_string(), pred.to_string()], self.embedding_model);
        let vectors = embed(embedder, &request).map_err(|e| e.to_string())?;
        cosine_similarity(&vectors[0], &vectors[1]).map_err(|e| e.to_string())
    }
}

/// Whether corpus means are taken over lines or over per-song means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMode {
    #[default]
    Lines,
    Songs,
}

/// Means for one (language, reference) cell of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub language: LanguageTag,
    pub reference_kind: ReferenceKind,
    /// Lines with any score in this group.
    pub line_count: usize,
    /// Lines with a syllabic score.
    pub syllabic_lines: usize,
    pub mismatched_lines: usize,
    pub error_rate: Option<f64>,
    pub mean_se: Option<f64>,
    pub mean_scd: Option<f64>,
    pub mean_phonetic: Option<f64>,
    pub mean_semantic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub mode: AggregationMode,
    pub beta: f64,
    /// Identity of the embedder behind the semantic column, if any.
    pub embedding_provider: Option<String>,
    pub groups: Vec<GroupReport>,
}

impl CorpusReport {
    pub fn group(&self, language: LanguageTag, kind: ReferenceKind) -> Option<&GroupReport> {
        self.groups
            .iter()
            .find(|g| g.language == language && g.reference_kind == kind)
    }

    /// Metric rows by language columns, one block per reference.
    pub fn render_table(&self) -> String {
        let languages: Vec<LanguageTag> = LanguageTag::TABLE_ORDER
            .into_iter()
            .filter(|l| self.groups.iter().any(|g| g.language == *l))
            .collect();
        type Getter = fn(&GroupReport) -> Option<f64>;
        let rows: [(&str, Getter); 5] = [
            ("SE", |g| g.mean_se),
            ("SCD", |g| g.mean_scd),
            ("Error Rate", |g| g.error_rate),
            ("Phonetic D", |g| g.mean_phonetic),
            ("Semantic", |g| g.mean_semantic),
        ];
        let mut out = String::new();
        for kind in ReferenceKind::ALL {
            if !self.groups.iter().any(|g| g.reference_kind == kind) {
                continue;
            }
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = writeln!(out, "{}", kind.title());
            let _ = write!(out, "{:<12}", "Metric");
            for l in &languages {
                let _ = write!(out, " {:>10}", l.name());
            }
            out.push('\n');
            for (name, get) in rows {
                let _ = write!(out, "{name:<12}");
                for l in &languages {
                    let cell = self.group(*l, kind).and_then(get).map_or("-".to_string(), |v| format!("{v:.3}"));
                    let _ = write!(out, " {cell:>10}");
                }
                out.push('\n');
            }
        }
        if let Some(p) = &self.embedding_provider {
            let _ = writeln!(out, "\nsemantic embeddings: {p}");
        }
        out
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Default)]
struct Acc {
    lines: usize,
    mismatched: usize,
    se: Vec<f64>,
    scd: Vec<f64>,
    flags: Vec<f64>,
    phonetic: Vec<f64>,
    semantic: Vec<f64>,
}

impl Acc {
    fn add(&mut self, s: &LineScore) {
        self.lines += 1;
        if let Some(syl) = &s.syllabic {
            self.se.push(syl.se);
            self.scd.push(syl.scd);
            self.flags.push(if syl.mismatch { 1.0 } else { 0.0 });
            self.mismatched += usize::from(syl.mismatch);
        }
        if let Some(p) = s.phonetic {
            self.phonetic.push(p as f64);
        }
        if let Some(v) = s.semantic {
            self.semantic.push(v);
        }
    }

    /// (error rate, se, scd, phonetic, semantic) means.
    fn means(&self) -> [Option<f64>; 5] {
        [mean(&self.flags), mean(&self.se), mean(&self.scd), mean(&self.phonetic), mean(&self.semantic)]
    }
}

/// Micro-averages scores per (language, reference kind).
pub fn aggregate(scores: &[LineScore]) -> Result<CorpusReport, MetricsError> {
    aggregate_with(scores.iter().map(|s| ("", s)), AggregationMode::Lines)
}

/// Aggregates `(song id, score)` pairs. In [`AggregationMode::Songs`] each
/// metric is first averaged within a song, then across songs.
pub fn aggregate_with<'s>(
    scores: impl IntoIterator<Item = (&'s str, &'s LineScore)>,
    mode: AggregationMode,
) -> Result<CorpusReport, MetricsError> {
    let mut cells: BTreeMap<(LanguageTag, ReferenceKind), BTreeMap<&str, Acc>> = BTreeMap::new();
    let mut any = false;
    for (song, score) in scores {
        any = true;
        let song = if mode == AggregationMode::Lines { "" } else { song };
        cells
            .entry((score.language, score.reference_kind))
            .or_default()
            .entry(song)
            .or_default()
            .add(score);
    }
    if !any {
        return Err(MetricsError::EmptyInput);
    }
    let groups = cells
        .into_iter()
        .map(|((language, reference_kind), songs)| {
            let lines = songs.values().map(|a| a.lines).sum();
            let syllabic_lines = songs.values().map(|a| a.flags.len()).sum();
            let mismatched_lines = songs.values().map(|a| a.mismatched).sum();
            let per_song: Vec<[Option<f64>; 5]> = songs.values().map(Acc::means).collect();
            let column = |i: usize| mean(&per_song.iter().filter_map(|m| m[i]).collect::<Vec<_>>());
            GroupReport {
                language,
                reference_kind,
                line_count: lines,
                syllabic_lines,
                mismatched_lines,
                error_rate: column(0),
                mean_se: column(1),
                mean_scd: column(2),
                mean_phonetic: column(3),
                mean_semantic: column(4),
            }
        })
        .collect();
    Ok(CorpusReport {
        mode,
        beta: SyllableErrorParams::default().beta,
        embedding_provider: None,
        groups,
    })
}
