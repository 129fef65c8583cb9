//! Boundary to generation and embedding services.
//!
//! Real services sit behind [`GenerationProvider`] / [`EmbeddingProvider`];
//! [`ProviderClient`] adds the retry policy, bounded parallelism and the
//! JSON-lines trace store on top of any of them. Offline runs use the mocks
//! in [`mock`] and the [`HashingEmbedder`].

mod hashing;
pub mod http;
pub mod mock;
mod trace;

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::TimeSpan;

pub use hashing::HashingEmbedder;
pub use trace::{TraceRecord, TraceStore};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limited: {0}")]
    RateLimited(String),
    #[error("timed out: {0}")]
    Timeout(String),
    #[error("service unavailable: {0}")]
    Unavailable(String),
    #[error("provider broke its contract: {0}")]
    Contract(String),
    #[error("invalid request: {0}")]
    Precondition(String),
    #[error("provider misconfigured: {0}")]
    Config(String),
    #[error("gave up after {attempts} attempts: {last}")]
    Exhausted {
        attempts: u32,
        last: Box<ProviderError>,
    },
}

impl ProviderError {
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            ProviderError::RateLimited(_) | ProviderError::Timeout(_) | ProviderError::Unavailable(_)
        )
    }
}

/// Sampling parameters sent with every generation request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub temperature: f64,
    pub top_p: f64,
    pub top_k: Option<u32>,
    pub max_output_tokens: u32,
    pub presence_penalty: Option<f64>,
}

impl GenerationConfig {
    /// Gemini settings: temperature 0.6, top-p 0.95, top-k 40, 8192 tokens.
    pub fn gemini() -> Self {
        Self {
            temperature: 0.6,
            top_p: 0.95,
            top_k: Some(40),
            max_output_tokens: 8192,
            presence_penalty: None,
        }
    }

    /// Qwen settings: temperature 0.7, top-p 0.8, 4096 tokens, presence
    /// penalty 1.05.
    pub fn qwen() -> Self {
        Self {
            temperature: 0.7,
            top_p: 0.8,
            top_k: None,
            max_output_tokens: 4096,
            presence_penalty: Some(1.05),
        }
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        let bad = |m: String| Err(ProviderError::Precondition(m));
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return bad(format!("temperature {} must be >= 0", self.temperature));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return bad(format!("top_p {} must be in (0, 1]", self.top_p));
        }
        if self.max_output_tokens == 0 {
            return bad("max_output_tokens must be >= 1".into());
        }
        Ok(())
    }
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self::gemini()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediaKind {
    Audio,
    Video,
}

/// A clip passed by reference; the core never opens the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediaAttachment {
    pub kind: MediaKind,
    pub uri: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_span: Option<TimeSpan>,
    /// MIME type; when absent it is guessed from the URI extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content_type: Option<String>,
}

impl MediaAttachment {
    pub fn new(kind: MediaKind, uri: impl Into<String>, time_span: Option<TimeSpan>) -> Self {
        Self {
            kind,
            uri: uri.into(),
            time_span,
            content_type: None,
        }
    }

    pub fn mime_type(&self) -> String {
        if let Some(ct) = &self.content_type {
            return ct.clone();
        }
        let ext = self
            .uri
            .rsplit('.')
            .next()
            .map(|e| e.split(['?', '#']).next().unwrap_or(e).to_ascii_lowercase())
            .unwrap_or_default();
        let guess = match (self.kind, ext.as_str()) {
            (MediaKind::Audio, "wav") => "audio/wav",
            (MediaKind::Audio, "flac") => "audio/flac",
            (MediaKind::Audio, "ogg") => "audio/ogg",
            (MediaKind::Audio, "m4a" | "aac") => "audio/aac",
            (MediaKind::Audio, _) => "audio/mpeg",
            (MediaKind::Video, "webm") => "video/webm",
            (MediaKind::Video, "mov") => "video/quicktime",
            (MediaKind::Video, _) => "video/mp4",
        };
        guess.to_string()
    }

    /// Checks that the declared content type agrees with the kind.
    pub fn validate(&self) -> Result<(), ProviderError> {
        let prefix = match self.kind {
            MediaKind::Audio => "audio/",
            MediaKind::Video => "video/",
        };
        if self.uri.trim().is_empty() {
            return Err(ProviderError::Precondition("media attachment without a URI".into()));
        }
        if !self.mime_type().starts_with(prefix) {
            return Err(ProviderError::Precondition(format!(
                "{:?} attachment declared as {}",
                self.kind,
                self.mime_type()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Model,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub text: String,
}

/// One generation call. The first turn is the prompt; re-prompts append the
/// model's previous reply and a corrective user turn. Media ride along with
/// the first turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub task_id: String,
    pub turns: Vec<Turn>,
    pub media: Vec<MediaAttachment>,
    pub config: GenerationConfig,
}

impl GenerationRequest {
    pub fn new(task_id: impl Into<String>, prompt_text: impl Into<String>, config: GenerationConfig) -> Self {
        Self {
            task_id: task_id.into(),
            turns: vec![Turn {
                role: Role::User,
                text: prompt_text.into(),
            }],
            media: Vec::new(),
            config,
        }
    }

    pub fn with_media(mut self, media: Vec<MediaAttachment>) -> Self {
        self.media = media;
        self
    }

    pub fn prompt_text(&self) -> &str {
        self.turns.first().map(|t| t.text.as_str()).unwrap_or("")
    }

    pub fn push_turn(&mut self, role: Role, text: impl Into<String>) {
        self.turns.push(Turn { role, text: text.into() });
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.prompt_text().trim().is_empty() {
            return Err(ProviderError::Precondition("empty prompt".into()));
        }
        if self.turns.last().map(|t| t.role) != Some(Role::User) {
            return Err(ProviderError::Precondition("conversation must end with a user turn".into()));
        }
        self.media.iter().try_for_each(MediaAttachment::validate)?;
        self.config.validate()
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("request serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingRequest {
    pub texts: Vec<String>,
    pub model_id: String,
}

impl EmbeddingRequest {
    pub fn new(texts: Vec<String>, model_id: impl Into<String>) -> Self {
        Self {
            texts,
            model_id: model_id.into(),
        }
    }
}

pub trait GenerationProvider: Send + Sync {
    /// Stable identifier recorded in traces and reports.
    fn id(&self) -> String;
    fn generate(&self, request: &GenerationRequest) -> Result<String, ProviderError>;
}

pub trait EmbeddingProvider: Send + Sync {
    fn id(&self) -> String;
    fn embed(&self, request: &EmbeddingRequest) -> Result<Vec<Vec<f64>>, ProviderError>;
}

/// Embeds `request.texts`, enforcing one vector per text and a consistent
/// dimension.
pub fn embed(provider: &dyn EmbeddingProvider, request: &EmbeddingRequest) -> Result<Vec<Vec<f64>>, ProviderError> {
    if request.texts.is_empty() {
        return Err(ProviderError::Precondition("no texts to embed".into()));
    }
    let vectors = provider.embed(request)?;
    if vectors.len() != request.texts.len() {
        return Err(ProviderError::Contract(format!(
            "{} vectors for {} texts",
            vectors.len(),
            request.texts.len()
        )));
    }
    if let Some(first) = vectors.first() {
        if first.is_empty() || vectors.iter().any(|v| v.len() != first.len()) {
            return Err(ProviderError::Contract("inconsistent embedding dimensions in batch".into()));
        }
    }
    Ok(vectors)
}

/// Exponential backoff. `max_attempts` caps the total number of calls,
/// including the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    #[serde(with = "millis")]
    pub base_delay: Duration,
    #[serde(with = "millis")]
    pub max_delay: Duration,
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 4,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(30),
        }
    }
}

impl RetryPolicy {
    pub fn no_delay(max_attempts: u32) -> Self {
        Self {
            max_attempts,
            base_delay: Duration::ZERO,
            max_delay: Duration::ZERO,
        }
    }

    /// Delay before attempt `attempt + 1`, `attempt` counting from 1.
    pub fn delay_after(&self, attempt: u32) -> Duration {
        let factor = 1u32.checked_shl(attempt.saturating_sub(1)).unwrap_or(u32::MAX);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }

    /// Runs `call` until it succeeds, fails permanently or the cap is hit.
    /// `call` receives the 1-based attempt number.
    pub fn run<T>(&self, mut call: impl FnMut(u32) -> Result<T, ProviderError>) -> Result<T, ProviderError> {
        let cap = self.max_attempts.max(1);
        let mut attempt = 1;
        loop {
            match call(attempt) {
                Ok(v) => return Ok(v),
                Err(e) if !e.is_retryable() => return Err(e),
                Err(e) if attempt >= cap => {
                    return Err(ProviderError::Exhausted {
                        attempts: attempt,
                        last: Box::new(e),
                    })
                }
                Err(e) => {
                    log::warn!("attempt {attempt} failed ({e}); retrying");
                    std::thread::sleep(self.delay_after(attempt));
                    attempt += 1;
                }
            }
        }
    }
}

/// Counting semaphore bounding in-flight requests.
#[derive(Debug)]
struct Limiter {
    capacity: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

struct Permit<'a>(&'a Limiter);

impl Limiter {
    fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().expect("limiter poisoned");
        while *n >= self.capacity {
            n = self.freed.wait(n).expect("limiter poisoned");
        }
        *n += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.in_flight.lock().expect("limiter poisoned") -= 1;
        self.0.freed.notify_one();
    }
}

/// A provider wrapped with retries, a parallelism bound and tracing.
pub struct ProviderClient<'a> {
    provider: &'a dyn GenerationProvider,
    retry: RetryPolicy,
    limiter: Limiter,
    trace: Option<&'a TraceStore>,
}

impl<'a> ProviderClient<'a> {
    pub fn new(provider: &'a dyn GenerationProvider) -> Self {
        Self {
            provider,
            retry: RetryPolicy::default(),
            limiter: Limiter::new(4),
            trace: None,
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_max_in_flight(mut self, n: usize) -> Self {
        self.limiter = Limiter::new(n);
        self
    }

    pub fn with_trace(mut self, store: &'a TraceStore) -> Self {
        self.trace = Some(store);
        self
    }

    pub fn provider_id(&self) -> String {
        self.provider.id()
    }

    pub fn max_in_flight(&self) -> usize {
        self.limiter.capacity
    }

    /// Sends `request`, retrying transient failures; every attempt is traced.
    pub fn generate(&self, request: &GenerationRequest) -> Result<String, ProviderError> {
        request.validate()?;
        let digest = request.digest();
        self.retry.run(|attempt| {
            let started = trace::now_ms();
            let outcome = {
                let _permit = self.limiter.acquire();
                self.provider.generate(request)
            };
            if let Some(store) = self.trace {
                let record = TraceRecord {
                    task_id: request.task_id.clone(),
                    attempt,
                    request_digest: digest.clone(),
                    response_text: outcome.as_ref().ok().cloned(),
                    error: outcome.as_ref().err().map(ToString::to_string),
                    started_ms: started,
                    finished_ms: trace::now_ms(),
                };
                if let Err(e) = store.append(&record) {
                    log::error!("trace store append failed: {e}");
                }
            }
            outcome
        })
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    use super::mock::{MockReply, ScriptedProvider};
    use super::*;

    fn req(text: &str) -> GenerationRequest {
        GenerationRequest::new("t1", text, GenerationConfig::default())
    }

    #[test]
    fn configs() {
        let g = GenerationConfig::default();
        assert_eq!((g.temperature, g.top_p, g.top_k, g.max_output_tokens), (0.6, 0.95, Some(40), 8192));
        let q = GenerationConfig::qwen();
        assert_eq!((q.temperature, q.top_p, q.max_output_tokens, q.presence_penalty), (0.7, 0.8, 4096, Some(1.05)));
        assert!(g.validate().is_ok() && q.validate().is_ok());
        for bad in [
            GenerationConfig { temperature: -0.1, ..g },
            GenerationConfig { top_p: 0.0, ..g },
            GenerationConfig { top_p: 1.5, ..g },
            GenerationConfig { max_output_tokens: 0, ..g },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn canned_reply_is_returned_verbatim() {
        let mock = ScriptedProvider::new(vec![MockReply::text("  hello\n")]);
        let client = ProviderClient::new(&mock);
        assert_eq!(client.generate(&req("p")).unwrap(), "  hello\n");
    }

    #[test]
    fn retries_until_success_within_cap() {
        let mock = ScriptedProvider::new(vec![
            MockReply::error(ProviderError::RateLimited("slow down".into())),
            MockReply::error(ProviderError::Timeout("late".into())),
            MockReply::text("ok"),
        ]);
        let client = ProviderClient::new(&mock).with_retry(RetryPolicy::no_delay(3));
        assert_eq!(client.generate(&req("p")).unwrap(), "ok");
        assert_eq!(mock.calls(), 3);
    }

    #[test]
    fn exhausts_at_cap() {
        let mock = ScriptedProvider::new(vec![
            MockReply::error(ProviderError::Unavailable("503".into())),
            MockReply::error(ProviderError::Unavailable("503".into())),
            MockReply::text("never"),
        ]);
        let client = ProviderClient::new(&mock).with_retry(RetryPolicy::no_delay(1));
        match client.generate(&req("p")).unwrap_err() {
            ProviderError::Exhausted { attempts, .. } => assert_eq!(attempts, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(mock.calls(), 1);
    }

    #[test]
    fn auth_failures_are_not_retried() {
        let mock = ScriptedProvider::new(vec![
            MockReply::error(ProviderError::Auth("bad key".into())),
            MockReply::text("never"),
        ]);
        let client = ProviderClient::new(&mock).with_retry(RetryPolicy::no_delay(5));
        assert!(matches!(client.generate(&req("p")), Err(ProviderError::Auth(_))));
        assert_eq!(mock.calls(), 1);
    }

    #[test]
    fn empty_prompt_is_rejected_before_calling() {
        let mock = ScriptedProvider::new(vec![MockReply::text("x")]);
        let client = ProviderClient::new(&mock);
        assert!(matches!(client.generate(&req("  ")), Err(ProviderError::Precondition(_))));
        assert_eq!(mock.calls(), 0);
    }

    #[test]
    fn backoff_grows_and_saturates() {
        let p = RetryPolicy {
            max_attempts: 10,
            base_delay: Duration::from_millis(100),
            max_delay: Duration::from_millis(350),
        };
        assert_eq!(p.delay_after(1), Duration::from_millis(100));
        assert_eq!(p.delay_after(2), Duration::from_millis(200));
        assert_eq!(p.delay_after(3), Duration::from_millis(350));
        assert_eq!(p.delay_after(60), Duration::from_millis(350));
    }

    #[test]
    fn media_kind_must_match_content_type() {
        let ok = MediaAttachment::new(MediaKind::Video, "clip.mp4", None);
        assert!(ok.validate().is_ok());
        assert_eq!(MediaAttachment::new(MediaKind::Audio, "a.wav", None).mime_type(), "audio/wav");
        let bad = MediaAttachment {
            content_type: Some("audio/mpeg".into()),
            ..ok
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn digest_depends_on_content() {
        assert_eq!(req("a").digest(), req("a").digest());
        assert_ne!(req("a").digest(), req("b").digest());
        assert_eq!(req("a").digest().len(), 64);
    }

    struct Slow {
        current: AtomicUsize,
        peak: AtomicUsize,
    }

    impl GenerationProvider for Slow {
        fn id(&self) -> String {
            "slow".into()
        }

        fn generate(&self, _: &GenerationRequest) -> Result<String, ProviderError> {
            let now = self.current.fetch_add(1, Ordering::SeqCst) + 1;
            self.peak.fetch_max(now, Ordering::SeqCst);
            std::thread::sleep(Duration::from_millis(20));
            self.current.fetch_sub(1, Ordering::SeqCst);
            Ok("done".into())
        }
    }

    #[test]
    fn in_flight_requests_are_bounded() {
        let slow = Arc::new(Slow {
            current: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        });
        let client = ProviderClient::new(slow.as_ref()).with_max_in_flight(2);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| client.generate(&req("p")).unwrap());
            }
        });
        assert!(slow.peak.load(Ordering::SeqCst) <= 2);
    }

    #[test]
    fn embed_checks_the_batch() {
        let h = HashingEmbedder::default();
        assert!(matches!(
            embed(&h, &EmbeddingRequest::new(vec![], "hash")),
            Err(ProviderError::Precondition(_))
        ));
        let v = embed(&h, &EmbeddingRequest::new(vec!["a".into(), "b".into()], "hash")).unwrap();
        assert_eq!(v.len(), 2);

        struct Ragged;
        impl EmbeddingProvider for Ragged {
            fn id(&self) -> String {
                "ragged".into()
            }
            fn embed(&self, _: &EmbeddingRequest) -> Result<Vec<Vec<f64>>, ProviderError> {
                Ok(vec![vec![1.0, 0.0], vec![1.0]])
            }
        }
        assert!(matches!(
            embed(&Ragged, &EmbeddingRequest::new(vec!["a".into(), "b".into()], "m")),
            Err(ProviderError::Contract(_))
        ));
    }
}
