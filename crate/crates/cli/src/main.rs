use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use singable::harness::{
    self, create_run_dir, load_dataset, sha256_hex, write_atomic, AblationKind, HarnessError, HypothesisSet,
    ProviderKind, RunConfig,
};
use singable::LanguageTag;

#[derive(Parser)]
#[command(name = "singable", version, about = "Singable lyrics translation: translate, evaluate, ablate, stats")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate every source line with the configured pipeline.
    Translate {
        #[command(flatten)]
        run: RunArgs,
        /// Also score the new hypotheses in the same run directory.
        #[arg(long)]
        evaluate: bool,
    },
    /// Score hypotheses against the original and dubbed references.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        /// hypotheses.json from a translate run.
        #[arg(long, conflicts_with = "human", required_unless_present = "human")]
        hypotheses: Option<PathBuf>,
        /// Score the dubbed lyrics themselves (the human-expert row).
        #[arg(long)]
        human: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run the stage and/or modality grid and compare the variants.
    Ablate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Grid::Stages)]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Per-language song, section and line counts.
    Stats {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Directory of `<song-id>/<LANG>.txt` lyric files.
    #[arg(long)]
    lyrics_dir: Option<PathBuf>,
    #[arg(long)]
    source_lang: Option<LanguageTag>,
    /// Repeat or comma-separate for several targets.
    #[arg(long, value_delimiter = ',')]
    target_lang: Vec<LanguageTag>,
    /// full, no-list, no-refine, bare, constrained or a ✓/✗ label.
    #[arg(long)]
    variant: Option<String>,
    /// T, T+A, T+V or T+A+V.
    #[arg(long)]
    modalities: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    provider: Option<Provider>,
    #[arg(long)]
    mock_script: Option<PathBuf>,
    /// Root directory for run outputs.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Provider {
    Mock,
    Gemini,
    Chat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    Stages,
    Modalities,
    Both,
}

fn base_config(path: Option<&Path>) -> Result<RunConfig, HarnessError> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

impl RunArgs {
    fn apply(self, mut c: RunConfig) -> RunConfig {
        if let Some(v) = self.dataset {
            c.dataset = v;
        }
        if self.lyrics_dir.is_some() {
            c.lyrics_dir = self.lyrics_dir;
        }
        if let Some(v) = self.source_lang {
            c.source_lang = v;
        }
        if !self.target_lang.is_empty() {
            c.target_langs = self.target_lang;
        }
        if let Some(v) = self.variant {
            c.variant = v;
        }
        if let Some(v) = self.modalities {
            c.modalities = v;
        }
        if let Some(v) = self.beta {
            c.beta = v;
        }
        if let Some(v) = self.provider {
            c.provider = match v {
                Provider::Mock => ProviderKind::Mock,
                Provider::Gemini => ProviderKind::Gemini,
                Provider::Chat => ProviderKind::Chat,
            };
        }
        if self.mock_script.is_some() {
            c.mock_script = self.mock_script;
        }
        if let Some(v) = self.out {
            c.out_dir = v;
        }
        if let Some(v) = self.parallelism {
            c.parallelism = v;
        }
        c
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, HarnessError> {
    serde_json::to_string_pretty(value).map_err(|e| HarnessError::Data(e.to_string()))
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let base = base_config(cli.config.as_deref())?;
    match cli.command {
        Command::Translate { run, evaluate } => {
            let config = run.apply(base);
            config.validate()?;
            let dataset = load_dataset(&config.dataset, config.lyrics_dir.as_deref())?;
            let provider = config.generation_provider()?;
            let dir = create_run_dir(&config.out_dir, "translate", &config.digest()?)?;
            let outcome = harness::translate(&config, &dataset, provider.as_ref(), config.pipeline_variant()?, &dir)?;
            eprintln!(
                "{} translated, {} failed, {} skipped",
                outcome.count(harness::OutcomeStatus::Translated),
                outcome.count(harness::OutcomeStatus::Failed),
                outcome.count(harness::OutcomeStatus::Skipped),
            );
            if evaluate {
                let embedder = config.embedding_provider()?;
                let eval = harness::evaluate(&config, &dataset, &outcome.hypotheses, embedder.as_deref())?;
                eval.write(&dir)?;
            }
            println!("{}", dir.display());
            outcome.check(config.failure_threshold)
        }
        Command::Evaluate { run, hypotheses, human, format } => {
            let config = run.apply(base);
            config.validate_scoring()?;
            let dataset = load_dataset(&config.dataset, config.lyrics_dir.as_deref())?;
            let hyp = match (&hypotheses, human) {
                (_, true) => HypothesisSet::from_references(&dataset, &config.target_langs),
                (Some(p), false) => HypothesisSet::load(p)?,
                (None, false) => return Err(HarnessError::Config("pass --hypotheses or --human".into())),
            };
            let embedder = config.embedding_provider()?;
            let eval = harness::evaluate(&config, &dataset, &hyp, embedder.as_deref())?;
            let hyp_bytes = to_json(&hyp)?;
            let digest = sha256_hex(&[config.digest()?.as_bytes(), hyp_bytes.as_bytes()]);
            let dir = create_run_dir(&config.out_dir, "evaluate", &digest)?;
            eval.write(&dir)?;
            write_atomic(&dir.join("hypotheses.json"), hyp_bytes.as_bytes())?;
            match format {
                Format::Csv => print!("{}", String::from_utf8_lossy(&eval.to_csv()?)),
                Format::Json => println!("{}", to_json(&eval)?),
                Format::Table => print!("{}", eval.to_table()),
            }
            eprintln!("{}", dir.display());
            Ok(())
        }
        Command::Ablate { run, grid, format } => {
            let config = run.apply(base);
            config.validate()?;
            let dataset = load_dataset(&config.dataset, config.lyrics_dir.as_deref())?;
            let embedder = config.embedding_provider()?;
            let kind = match grid {
                Grid::Stages => AblationKind::Stages,
                Grid::Modalities => AblationKind::Modalities,
                Grid::Both => AblationKind::Both,
            };
            let make = || config.generation_provider();
            let outcome = harness::ablate(&config, &dataset, &make, embedder.as_deref(), kind)?;
            match format {
                Format::Json => println!("{}", to_json(&outcome)?),
                _ => print!("{}", outcome.render_table()),
            }
            eprintln!("{}", outcome.root.display());
            Ok(())
        }
        Command::Stats { dataset, format } => {
            let path = dataset.unwrap_or(base.dataset);
            let report = harness::stats(&path)?;
            match format {
                Format::Json => println!("{}", to_json(&report)?),
                _ => print!("{report}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
