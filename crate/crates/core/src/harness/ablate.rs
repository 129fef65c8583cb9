use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::translate::line_media;
use super::{create_run_dir, evaluate, translate, write_atomic, write_json, HarnessError, HypothesisSet, RunConfig};
use crate::data::Dataset;
use crate::lang::LanguageTag;
use crate::metrics::{GroupReport, ReferenceKind};
use crate::pipeline::{Modalities, PipelineVariant};
use crate::providers::{EmbeddingProvider, GenerationProvider};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AblationKind {
    /// Syllable list × refine, at the configured modalities.
    #[default]
    Stages,
    /// T, T+V, T+A, T+A+V with every step enabled.
    Modalities,
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub se: Option<f64>,
    pub scd: Option<f64>,
    pub error_rate: Option<f64>,
    pub semantic: Option<f64>,
    pub phonetic: Option<f64>,
}

impl From<&GroupReport> for Cell {
    fn from(g: &GroupReport) -> Self {
        Self {
            se: g.mean_se,
            scd: g.mean_scd,
            error_rate: g.error_rate,
            semantic: g.mean_semantic,
            phonetic: g.mean_phonetic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    /// `✓✗`-style stage label.
    pub label: String,
    pub modalities: String,
    pub language: LanguageTag,
    pub skipped: Option<String>,
    pub run_dir: Option<PathBuf>,
    pub original_en: Cell,
    pub dubbed: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationOutcome {
    pub root: PathBuf,
    pub rows: Vec<AblationRow>,
    /// Hypotheses of every executed variant, keyed by variant slug.
    #[serde(skip)]
    pub hypotheses: BTreeMap<String, HypothesisSet>,
}

fn variants(kind: AblationKind, base: Modalities) -> Vec<PipelineVariant> {
    let mut out = Vec::new();
    if matches!(kind, AblationKind::Stages | AblationKind::Both) {
        out.extend(PipelineVariant::stage_grid(base));
    }
    if matches!(kind, AblationKind::Modalities | AblationKind::Both) {
        for m in Modalities::GRID {
            let v = PipelineVariant {
                modalities: m,
                ..PipelineVariant::full()
            };
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

fn available_modalities(dataset: &Dataset, source: LanguageTag) -> Modalities {
    let mut m = Modalities::TEXT;
    for entries in dataset.songs.values() {
        if let Some(entry) = entries.get(&source) {
            for (_, line) in entry.lines() {
                m = Modalities::available(&line_media(entry, line, 0)).union(m);
            }
        }
    }
    m
}

/// Runs translate + evaluate for each variant of the requested grid under
/// one ablation directory and writes a comparison table. Variants needing
/// media the dataset does not have are listed as skipped. `make_provider`
/// is called once per variant so scripted mocks restart for each run.
pub fn ablate(
    config: &RunConfig,
    dataset: &Dataset,
    make_provider: &dyn Fn() -> Result<Box<dyn GenerationProvider>, HarnessError>,
    embedder: Option<&dyn EmbeddingProvider>,
    kind: AblationKind,
) -> Result<AblationOutcome, HarnessError> {
    let available = available_modalities(dataset, config.source_lang);
    let base = config.pipeline_variant()?.modalities.intersect(available);
    let root = create_run_dir(&config.out_dir, "ablate", &config.digest()?)?;
    let mut rows = Vec::new();
    let mut hypotheses = BTreeMap::new();
    for variant in variants(kind, base) {
        let skip = (!available.contains(variant.modalities))
            .then(|| format!("no {} media in dataset", variant.modalities));
        let mut per_lang: Vec<(LanguageTag, Cell, Cell)> = Vec::new();
        let mut run_dir = None;
        if skip.is_none() {
            let dir = root.join(variant.slug());
            std::fs::create_dir_all(&dir).map_err(|e| super::io_error(&dir, e))?;
            let provider = make_provider()?;
            let outcome = translate(config, dataset, provider.as_ref(), variant, &dir)?;
            outcome.check(config.failure_threshold)?;
            let evaluation = evaluate(config, dataset, &outcome.hypotheses, embedder)?;
            evaluation.write(&dir)?;
            for &lang in &config.target_langs {
                let cell = |k: ReferenceKind| {
                    evaluation
                        .report
                        .as_ref()
                        .and_then(|r| r.group(lang, k))
                        .map(Cell::from)
                        .unwrap_or_default()
                };
                per_lang.push((lang, cell(ReferenceKind::OriginalEn), cell(ReferenceKind::Dubbed)));
            }
            hypotheses.insert(variant.slug(), outcome.hypotheses);
            run_dir = Some(dir);
        } else {
            per_lang.extend(config.target_langs.iter().map(|&l| (l, Cell::default(), Cell::default())));
        }
        for (language, original_en, dubbed) in per_lang {
            rows.push(AblationRow {
                label: variant.stage_label(),
                modalities: variant.modalities.to_string(),
                language,
                skipped: skip.clone(),
                run_dir: run_dir.clone(),
                original_en,
                dubbed,
            });
        }
    }
    let outcome = AblationOutcome { root: root.clone(), rows, hypotheses };
    write_json(&root.join("config.json"), config)?;
    write_json(&root.join("comparison.json"), &outcome)?;
    write_atomic(&root.join("comparison.txt"), outcome.render_table().as_bytes())?;
    Ok(outcome)
}

fn cell(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |x| format!("{x:.3}"))
}

impl AblationOutcome {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let metrics = ["SE", "SCD", "ER", "Sem", "D"];
        let _ = write!(out, "{:<6} {:<7} {:<9}", "Steps", "Input", "Language");
        for prefix in ["en", "dub"] {
            for m in metrics {
                let _ = write!(out, " {:>9}", format!("{prefix}:{m}"));
            }
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:<6} {:<7} {:<9}", r.label, r.modalities, r.language.name());
            if let Some(reason) = &r.skipped {
                let _ = writeln!(out, " skipped ({reason})");
                continue;
            }
            for c in [&r.original_en, &r.dubbed] {
                for v in [c.se, c.scd, c.error_rate, c.semantic, c.phonetic] {
                    let _ = write!(out, " {:>9}", cell(v));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}
