//! Experiment workflows over a dataset: translate, evaluate, ablate, stats.
//!
//! Every run writes into its own directory under the output root, named by a
//! digest of the configuration and dataset, so reruns never overwrite
//! earlier evidence.

mod ablate;
mod config;
mod evaluate;
mod hypotheses;
mod translate;

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::data::{self, Dataset};

pub use ablate::{ablate, AblationKind, AblationOutcome, AblationRow};
pub use config::{EmbeddingKind, ProviderKind, RunConfig};
pub use evaluate::{evaluate, EvalRow, Evaluation, RowStatus};
pub use hypotheses::{HypKey, HypothesisEntry, HypothesisSet};
pub use translate::{translate, LineOutcome, OutcomeStatus, TranslateOutcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("provider error: {0}")]
    Provider(String),
    #[error("{failed} of {total} lines failed (threshold {threshold})")]
    Threshold { failed: usize, total: usize, threshold: f64 },
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl HarnessError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io { .. } => 2,
            HarnessError::Data(_) => 3,
            HarnessError::Provider(_) => 4,
            HarnessError::Threshold { .. } => 5,
        }
    }
}

impl From<data::DataError> for HarnessError {
    fn from(e: data::DataError) -> Self {
        HarnessError::Data(e.to_string())
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| io_error(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| io_error(path, e))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Creates a fresh run directory `<root>/<kind>-<digest>`; a numeric suffix
/// is added when that directory already exists.
pub fn create_run_dir(root: &Path, kind: &str, digest: &str) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(root).map_err(|e| io_error(root, e))?;
    let base = format!("{kind}-{}", &digest[..digest.len().min(12)]);
    for n in 1.. {
        let name = if n == 1 { base.clone() } else { format!("{base}-r{n}") };
        let dir = root.join(name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(io_error(&dir, e)),
        }
    }
    unreachable!("run directory numbering is unbounded")
}

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

/// Applies `f` to every item on up to `workers` threads; results keep the
/// input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("result slot poisoned") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("result slot poisoned").expect("every item processed"))
        .collect()
}

/// Reads and parses a dataset, then re-attaches lyric text from
/// `<lyrics_dir>/<song-id>/<LANG>.txt` (one candidate line per text line)
/// where such files exist.
pub fn load_dataset(path: &Path, lyrics_dir: Option<&Path>) -> Result<Dataset, HarnessError> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
    let mut dataset = data::parse_dataset(&bytes).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
    if let Some(dir) = lyrics_dir {
        for (song_id, entries) in dataset.songs.iter_mut() {
            for (lang, entry) in entries.iter_mut() {
                let file = dir.join(song_id).join(format!("{}.txt", lang.code()));
                if !file.exists() {
                    continue;
                }
                let text = std::fs::read_to_string(&file)
                    .map_err(|e| HarnessError::Data(format!("{}: {e}", file.display())))?;
                let candidates: Vec<String> = text.lines().map(str::to_string).collect();
                let (resolved, unmatched) =
                    data::reconstruct_song(entry, &candidates, data::default_tokenizer(*lang));
                if !unmatched.is_empty() {
                    log::warn!("{song_id}/{lang}: {} lines could not be matched", unmatched.len());
                }
                *entry = resolved;
            }
        }
    }
    Ok(dataset)
}

/// Per-language statistics rendered as a table.
pub fn stats(path: &Path) -> Result<data::StatsReport, HarnessError> {
    Ok(data::dataset_stats(&load_dataset(path, None)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<u32> = (0..100).collect();
        assert_eq!(parallel_map(&items, 8, |x| x * 2), items.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert!(parallel_map(&Vec::<u32>::new(), 4, |x| *x).is_empty());
    }

    #[test]
    fn run_dirs_never_collide() {
        let root = tempfile::tempdir().unwrap();
        let a = create_run_dir(root.path(), "eval", "abcdef0123456789").unwrap();
        let b = create_run_dir(root.path(), "eval", "abcdef0123456789").unwrap();
        assert_ne!(a, b);
        assert!(a.ends_with("eval-abcdef012345"));
        assert!(b.ends_with("eval-abcdef012345-r2"));
    }

    #[test]
    fn atomic_write_replaces() {
        let root = tempfile::tempdir().unwrap();
        let p = root.path().join("x/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Config("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Data("x".into()).exit_code(), 3);
        assert_eq!(HarnessError::Provider("x".into()).exit_code(), 4);
        assert_eq!(HarnessError::Threshold { failed: 1, total: 1, threshold: 0.5 }.exit_code(), 5);
    }
}
