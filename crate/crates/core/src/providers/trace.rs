use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::ProviderError;

/// One provider call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub task_id: String,
    pub attempt: u32,
    pub request_digest: String,
    pub response_text: Option<String>,
    pub error: Option<String>,
    pub started_ms: u64,
    pub finished_ms: u64,
}

pub(crate) fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Append-only JSON-lines log of provider calls. Appends from concurrent
/// tasks are serialized.
#[derive(Debug)]
pub struct TraceStore {
    path: PathBuf,
    file: Mutex<File>,
}

fn io_error(path: &Path, e: std::io::Error) -> ProviderError {
    ProviderError::Config(format!("trace store {}: {e}", path.display()))
}

impl TraceStore {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, ProviderError> {
        let path = path.into();
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| io_error(&path, e))?;
        Ok(Self {
            path,
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &TraceRecord) -> Result<(), ProviderError> {
        let mut line = serde_json::to_string(record).expect("trace record serializes");
        line.push('\n');
        let mut file = self.file.lock().expect("trace store poisoned");
        file.write_all(line.as_bytes()).map_err(|e| io_error(&self.path, e))
    }

    pub fn read_all(path: &Path) -> Result<Vec<TraceRecord>, ProviderError> {
        let file = File::open(path).map_err(|e| io_error(path, e))?;
        BufReader::new(file)
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|l| {
                let l = l.map_err(|e| io_error(path, e))?;
                serde_json::from_str(&l).map_err(|e| ProviderError::Contract(format!("bad trace line: {e}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::mock::{MockReply, ScriptedProvider};
    use super::super::{GenerationConfig, GenerationRequest, ProviderClient, RetryPolicy};
    use super::*;

    #[test]
    fn every_attempt_is_logged() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.jsonl");
        let store = TraceStore::open(&path).unwrap();
        let mock = ScriptedProvider::new(vec![
            MockReply::error(ProviderError::Timeout("t".into())),
            MockReply::text("answer"),
        ]);
        let client = ProviderClient::new(&mock)
            .with_retry(RetryPolicy::no_delay(3))
            .with_trace(&store);
        let request = GenerationRequest::new("song/KO/0/0", "prompt", GenerationConfig::default());
        client.generate(&request).unwrap();
        let records = TraceStore::read_all(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].attempt, 1);
        assert!(records[0].error.as_deref().unwrap().contains("timed out"));
        assert_eq!(records[1].response_text.as_deref(), Some("answer"));
        assert!(records.iter().all(|r| r.task_id == "song/KO/0/0" && r.request_digest == request.digest()));
        assert!(records.iter().all(|r| r.started_ms <= r.finished_ms));
    }
}
