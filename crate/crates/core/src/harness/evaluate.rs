use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parallel_map, write_atomic, write_json, HarnessError, HypKey, HypothesisSet, RunConfig};
use crate::data::{Dataset, LyricLine};
use crate::lang::LanguageTag;
use crate::metrics::{aggregate_with, CorpusReport, LineScore, ReferenceKind, Scorer};
use crate::providers::EmbeddingProvider;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Scored,
    Skipped,
}

/// One CSV row: a (line, reference) pair, scored or skipped with a reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub song_id: String,
    pub language: LanguageTag,
    pub section: usize,
    pub line: usize,
    pub reference_kind: ReferenceKind,
    pub status: RowStatus,
    pub reason: String,
    pub c_ref: Option<usize>,
    pub c_pred: Option<usize>,
    pub se: Option<String>,
    pub scd: Option<String>,
    pub mismatch: Option<bool>,
    pub phonetic: Option<usize>,
    pub semantic: Option<String>,
    pub errors: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub provenance: String,
    pub rows: Vec<EvalRow>,
    #[serde(skip)]
    pub scores: Vec<(HypKey, LineScore)>,
    pub report: Option<CorpusReport>,
    /// Skipped rows by reason.
    pub skipped: BTreeMap<String, usize>,
}

fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

impl Evaluation {
    pub fn to_csv(&self) -> Result<Vec<u8>, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| HarnessError::Data(e.to_string()))?;
        }
        w.into_inner().map_err(|e| HarnessError::Data(e.to_string()))
    }

    pub fn to_table(&self) -> String {
        let mut out = match &self.report {
            Some(r) => r.render_table(),
            None => "no lines were scored\n".to_string(),
        };
        if !self.skipped.is_empty() {
            out.push_str("\nskipped rows:\n");
            for (reason, n) in &self.skipped {
                out.push_str(&format!("  {n:>6}  {reason}\n"));
            }
        }
        out
    }

    /// Writes `evaluation.csv`, `report.json` and `report.txt`.
    pub fn write(&self, run_dir: &Path) -> Result<(), HarnessError> {
        write_atomic(&run_dir.join("evaluation.csv"), &self.to_csv()?)?;
        write_json(&run_dir.join("report.json"), self)?;
        write_atomic(&run_dir.join("report.txt"), self.to_table().as_bytes())
    }
}

struct Job<'d> {
    key: HypKey,
    kind: ReferenceKind,
    outcome: Result<(&'d str, &'d str, LanguageTag, Option<usize>), &'static str>,
}

fn reference<'d>(
    dataset: &'d Dataset,
    key: &HypKey,
    lang: LanguageTag,
) -> Result<&'d LyricLine, &'static str> {
    let entry = dataset.songs[&key.song_id]
        .get(&lang)
        .ok_or(if lang.is_original() { "no original entry" } else { "no dubbed entry" })?;
    entry
        .sections
        .get(key.section)
        .and_then(|s| s.lines.get(key.line))
        .ok_or("no reference line")
}

/// Scores every hypothesis line against the English original and the dubbed
/// lyrics of its language. Each line of the songs involved yields exactly
/// one row per reference kind.
pub fn evaluate(
    config: &RunConfig,
    dataset: &Dataset,
    hypotheses: &HypothesisSet,
    embedder: Option<&dyn EmbeddingProvider>,
) -> Result<Evaluation, HarnessError> {
    hypotheses.check_keys(dataset, config.source_lang)?;
    let languages = if config.target_langs.is_empty() {
        hypotheses.languages()
    } else {
        config.target_langs.clone()
    };
    let syllabifier = config.syllabifier()?;
    let rules = config.rules()?;
    let scorer = Scorer {
        syllabifier: &syllabifier,
        rules: &rules,
        embedder,
        embedding_model: &config.embedding_model,
        params: config.params()?,
        policy: config.normalization,
    };

    let mut jobs = Vec::new();
    for (song_id, entries) in &dataset.songs {
        for &lang in &languages {
            let mut positions = BTreeSet::new();
            for l in [config.source_lang, LanguageTag::En, lang] {
                if let Some(entry) = entries.get(&l) {
                    positions.extend(entry.lines().map(|(s, line)| (s.index, line.index)));
                }
            }
            for (section, line) in positions {
                let key = HypKey {
                    song_id: song_id.clone(),
                    language: lang,
                    section,
                    line,
                };
                for kind in ReferenceKind::ALL {
                    let ref_lang = match kind {
                        ReferenceKind::OriginalEn => LanguageTag::En,
                        ReferenceKind::Dubbed => lang,
                    };
                    let outcome = match hypotheses.entries.get(&key) {
                        None => Err("no hypothesis"),
                        Some(pred) => reference(dataset, &key, ref_lang).and_then(|r| {
                            r.resolved_text
                                .as_deref()
                                .map(|t| (t, pred.as_str(), ref_lang, r.syllable_count))
                                .ok_or("reference text unresolved")
                        }),
                    };
                    jobs.push(Job { key: key.clone(), kind, outcome });
                }
            }
        }
    }

    let scored = parallel_map(&jobs, config.parallelism, |job| {
        job.outcome.map(|(gt, pred, ref_lang, count)| {
            scorer.score_line_counted(gt, count, pred, ref_lang, job.key.language, job.kind, &config.components)
        })
    });

    let mut rows = Vec::with_capacity(jobs.len());
    let mut scores = Vec::new();
    let mut skipped: BTreeMap<String, usize> = BTreeMap::new();
    for (job, result) in jobs.iter().zip(scored) {
        let mut row = EvalRow {
            song_id: job.key.song_id.clone(),
            language: job.key.language,
            section: job.key.section,
            line: job.key.line,
            reference_kind: job.kind,
            status: RowStatus::Skipped,
            reason: String::new(),
            c_ref: None,
            c_pred: None,
            se: None,
            scd: None,
            mismatch: None,
            phonetic: None,
            semantic: None,
            errors: String::new(),
        };
        match result {
            Err(reason) => {
                row.reason = reason.to_string();
                *skipped.entry(reason.to_string()).or_default() += 1;
            }
            Ok(score) => {
                row.status = RowStatus::Scored;
                if let Some(s) = &score.syllabic {
                    row.c_ref = Some(s.c_ref);
                    row.c_pred = Some(s.c_pred);
                    row.se = Some(fixed(s.se));
                    row.scd = Some(fixed(s.scd));
                    row.mismatch = Some(s.mismatch);
                }
                row.phonetic = score.phonetic;
                row.semantic = score.semantic.map(fixed);
                row.errors = score
                    .errors
                    .iter()
                    .map(|(c, e)| format!("{c:?}: {e}").to_lowercase())
                    .collect::<Vec<_>>()
                    .join("; ");
                scores.push((job.key.clone(), score));
            }
        }
        rows.push(row);
    }

    let report = if scores.is_empty() {
        None
    } else {
        let mut r = aggregate_with(scores.iter().map(|(k, s)| (k.song_id.as_str(), s)), config.aggregation)
            .map_err(|e| HarnessError::Data(e.to_string()))?;
        r.beta = config.beta;
        r.embedding_provider = embedder
            .filter(|_| config.components.contains(&crate::metrics::Component::Semantic))
            .map(|e| e.id());
        Some(r)
    };
    Ok(Evaluation {
        provenance: hypotheses.provenance.clone(),
        rows,
        scores,
        report,
        skipped,
    })
}
