//! HTTP clients for hosted models.
//!
//! Endpoints, model ids and keys come from the environment:
//!
//! | variable | meaning |
//! |---|---|
//! | `SINGABLE_GEMINI_API_KEY` | key for the Gemini `generateContent` API |
//! | `SINGABLE_GEMINI_MODEL` | model id (default `gemini-2.0-flash`) |
//! | `SINGABLE_GEMINI_ENDPOINT` | API root (default Google's public endpoint) |
//! | `SINGABLE_OPENAI_BASE_URL` | root of an OpenAI-compatible API (chat + embeddings) |
//! | `SINGABLE_OPENAI_API_KEY` | bearer token for it (optional for local servers) |
//! | `SINGABLE_OPENAI_MODEL` | chat model id |
//! | `SINGABLE_EMBEDDING_MODEL` | embedding model id |
//! | `SINGABLE_HTTP_TIMEOUT_SECS` | per-request timeout (default 120) |

use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

use super::{
    EmbeddingProvider, EmbeddingRequest, GenerationProvider, GenerationRequest, MediaKind, ProviderError, Role,
};

const GEMINI_ROOT: &str = "https://generativelanguage.googleapis.com/v1beta";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub base_url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
}

fn timeout_from(lookup: &dyn Fn(&str) -> Option<String>) -> Result<Duration, ProviderError> {
    match lookup("SINGABLE_HTTP_TIMEOUT_SECS") {
        None => Ok(Duration::from_secs(120)),
        Some(s) => s
            .trim()
            .parse()
            .map(Duration::from_secs)
            .map_err(|_| ProviderError::Config(format!("SINGABLE_HTTP_TIMEOUT_SECS={s} is not a number"))),
    }
}

fn required(lookup: &dyn Fn(&str) -> Option<String>, key: &str) -> Result<String, ProviderError> {
    lookup(key)
        .filter(|v| !v.trim().is_empty())
        .ok_or_else(|| ProviderError::Config(format!("{key} is not set")))
}

fn env(key: &str) -> Option<String> {
    std::env::var(key).ok()
}

fn build_client(timeout: Duration) -> Result<Client, ProviderError> {
    Client::builder()
        .timeout(timeout)
        .build()
        .map_err(|e| ProviderError::Config(format!("HTTP client: {e}")))
}

fn classify(status: StatusCode, body: &str) -> ProviderError {
    let msg = format!("HTTP {status}: {}", body.chars().take(300).collect::<String>());
    match status.as_u16() {
        401 | 403 => ProviderError::Auth(msg),
        429 => ProviderError::RateLimited(msg),
        408 | 504 => ProviderError::Timeout(msg),
        500..=599 => ProviderError::Unavailable(msg),
        _ => ProviderError::Contract(msg),
    }
}

fn send(request: reqwest::blocking::RequestBuilder) -> Result<Value, ProviderError> {
    let response = request.send().map_err(|e| {
        if e.is_timeout() {
            ProviderError::Timeout(e.to_string())
        } else {
            ProviderError::Unavailable(e.to_string())
        }
    })?;
    let status = response.status();
    let body = response
        .text()
        .map_err(|e| ProviderError::Unavailable(format!("reading body: {e}")))?;
    if !status.is_success() {
        return Err(classify(status, &body));
    }
    serde_json::from_str(&body).map_err(|e| ProviderError::Contract(format!("response is not JSON: {e}")))
}

fn seconds(ms: u64) -> String {
    format!("{}.{:03}s", ms / 1000, ms % 1000)
}

/// Gemini `generateContent`; media go by file URI with clip offsets.
#[derive(Debug, Clone)]
pub struct GeminiProvider {
    endpoint: Endpoint,
    client: Client,
}

impl GeminiProvider {
    pub fn new(endpoint: Endpoint) -> Result<Self, ProviderError> {
        let client = build_client(endpoint.timeout)?;
        Ok(Self { endpoint, client })
    }

    pub fn from_env() -> Result<Self, ProviderError> {
        Self::from_lookup(&env)
    }

    pub fn from_lookup(lookup: &dyn Fn(&str) -> Option<String>) -> Result<Self, ProviderError> {
        Self::new(Endpoint {
            base_url: lookup("SINGABLE_GEMINI_ENDPOINT").unwrap_or_else(|| GEMINI_ROOT.to_string()),
            api_key: Some(required(lookup, "SINGABLE_GEMINI_API_KEY")?),
            model: lookup("SINGABLE_GEMINI_MODEL").unwrap_or_else(|| "gemini-2.0-flash".to_string()),
            timeout: timeout_from(lookup)?,
        })
    }

    pub fn body(request: &GenerationRequest) -> Value {
        let mut contents = Vec::new();
        for (i, turn) in request.turns.iter().enumerate() {
            let mut parts = Vec::new();
            if i == 0 {
                for m in &request.media {
                    let mut part = json!({
                        "fileData": { "mimeType": m.mime_type(), "fileUri": m.uri }
                    });
                    if let Some(span) = m.time_span {
                        part["videoMetadata"] = json!({
                            "startOffset": seconds(span.start_ms),
                            "endOffset": seconds(span.end_ms),
                        });
                    }
                    parts.push(part);
                }
            }
            parts.push(json!({ "text": turn.text }));
            let role = match turn.role {
                Role::User => "user",
                Role::Model => "model",
            };
            contents.push(json!({ "role": role, "parts": parts }));
        }
        let c = &request.config;
        let mut config = json!({
            "temperature": c.temperature,
            "topP": c.top_p,
            "maxOutputTokens": c.max_output_tokens,
            "responseMimeType": "text/plain",
        });
        if let Some(k) = c.top_k {
            config["topK"] = json!(k);
        }
        if let Some(p) = c.presence_penalty {
            config["presencePenalty"] = json!(p);
        }
        json!({ "contents": contents, "generationConfig": config })
    }
}

impl GenerationProvider for GeminiProvider {
    fn id(&self) -> String {
        format!("gemini:{}", self.endpoint.model)
    }

    fn generate(&self, request: &GenerationRequest) -> Result<String, ProviderError> {
        let url = format!(
            "{}/models/{}:generateContent",
            self.endpoint.base_url.trim_end_matches('/'),
            self.endpoint.model
        );
        let mut builder = self.client.post(url).json(&Self::body(request));
        if let Some(key) = &self.endpoint.api_key {
            builder = builder.header("x-goog-api-key", key);
        }
        let value = send(builder)?;
        let parts = value
            .pointer("/candidates/0/content/parts")
            .and_then(Value::as_array)
            .ok_or_else(|| ProviderError::Contract("no candidate text in response".into()))?;
        Ok(parts.iter().filter_map(|p| p.get("text").and_then(Value::as_str)).collect())
    }
}

/// OpenAI-compatible `chat/completions` (e.g. a Qwen deployment).
#[derive(Debug, Clone)]
pub struct ChatCompletionsProvider {
    endpoint: Endpoint,
    client: Client,
}

fn openai_endpoint(lookup: &dyn Fn(&str) -> Option<String>, model_key: &str) -> Result<Endpoint, ProviderError> {
    Ok(Endpoint {
        base_url: required(lookup, "SINGABLE_OPENAI_BASE_URL")?,
        api_key: lookup("SINGABLE_OPENAI_API_KEY").filter(|k| !k.is_empty()),
        model: required(lookup, model_key)?,
        timeout: timeout_from(lookup)?,
    })
}

fn authorize(builder: reqwest::blocking::RequestBuilder, endpoint: &Endpoint) -> reqwest::blocking::RequestBuilder {
    match &endpoint.api_key {
        Some(key) => builder.bearer_auth(key),
        None => builder,
    }
}

impl ChatCompletionsProvider {
    pub fn new(endpoint: Endpoint) -> Result<Self, ProviderError> {
        let client = build_client(endpoint.timeout)?;
        Ok(Self { endpoint, client })
    }

    pub fn from_env() -> Result<Self, ProviderError> {
        Self::from_lookup(&env)
    }

    pub fn from_lookup(lookup: &dyn Fn(&str) -> Option<String>) -> Result<Self, ProviderError> {
        Self::new(openai_endpoint(lookup, "SINGABLE_OPENAI_MODEL")?)
    }

    pub fn body(&self, request: &GenerationRequest) -> Value {
        let mut messages = Vec::new();
        for (i, turn) in request.turns.iter().enumerate() {
            match turn.role {
                Role::Model => messages.push(json!({ "role": "assistant", "content": turn.text })),
                Role::User if i == 0 && !request.media.is_empty() => {
                    let mut content: Vec<Value> = request
                        .media
                        .iter()
                        .map(|m| match m.kind {
                            MediaKind::Video => json!({ "type": "video_url", "video_url": { "url": m.uri } }),
                            MediaKind::Audio => json!({ "type": "input_audio", "input_audio": {
                                "data": m.uri,
                                "format": m.mime_type().trim_start_matches("audio/"),
                            }}),
                        })
                        .collect();
                    content.push(json!({ "type": "text", "text": turn.text }));
                    messages.push(json!({ "role": "user", "content": content }));
                }
                Role::User => messages.push(json!({ "role": "user", "content": turn.text })),
            }
        }
        let c = &request.config;
        let mut body = json!({
            "model": self.endpoint.model,
            "messages": messages,
            "temperature": c.temperature,
            "top_p": c.top_p,
            "max_tokens": c.max_output_tokens,
        });
        if let Some(p) = c.presence_penalty {
            body["presence_penalty"] = json!(p);
        }
        if let Some(k) = c.top_k {
            body["top_k"] = json!(k);
        }
        body
    }
}

impl GenerationProvider for ChatCompletionsProvider {
    fn id(&self) -> String {
        format!("chat:{}", self.endpoint.model)
    }

    fn generate(&self, request: &GenerationRequest) -> Result<String, ProviderError> {
        let url = format!("{}/chat/completions", self.endpoint.base_url.trim_end_matches('/'));
        let builder = authorize(self.client.post(url).json(&self.body(request)), &self.endpoint);
        let value = send(builder)?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ProviderError::Contract("no message content in response".into()))
    }
}

/// OpenAI-compatible `embeddings` endpoint.
#[derive(Debug, Clone)]
pub struct HttpEmbeddingProvider {
    endpoint: Endpoint,
    client: Client,
}

impl HttpEmbeddingProvider {
    pub fn new(endpoint: Endpoint) -> Result<Self, ProviderError> {
        let client = build_client(endpoint.timeout)?;
        Ok(Self { endpoint, client })
    }

    pub fn from_env() -> Result<Self, ProviderError> {
        Self::from_lookup(&env)
    }

    pub fn from_lookup(lookup: &dyn Fn(&str) -> Option<String>) -> Result<Self, ProviderError> {
        Self::new(openai_endpoint(lookup, "SINGABLE_EMBEDDING_MODEL")?)
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn id(&self) -> String {
        format!("embeddings:{}", self.endpoint.model)
    }

    fn embed(&self, request: &EmbeddingRequest) -> Result<Vec<Vec<f64>>, ProviderError> {
        if request.texts.is_empty() {
            return Err(ProviderError::Precondition("no texts to embed".into()));
        }
        let model = if request.model_id.is_empty() {
            &self.endpoint.model
        } else {
            &request.model_id
        };
        let url = format!("{}/embeddings", self.endpoint.base_url.trim_end_matches('/'));
        let body = json!({ "model": model, "input": request.texts });
        let value = send(authorize(self.client.post(url).json(&body), &self.endpoint))?;
        let data = value
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| ProviderError::Contract("no `data` array in response".into()))?;
        let mut rows: Vec<(u64, Vec<f64>)> = data
            .iter()
            .enumerate()
            .map(|(i, item)| {
                let index = item.get("index").and_then(Value::as_u64).unwrap_or(i as u64);
                let vector = item
                    .get("embedding")
                    .and_then(Value::as_array)
                    .ok_or_else(|| ProviderError::Contract("item without `embedding`".into()))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| ProviderError::Contract("non-numeric embedding".into())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((index, vector))
            })
            .collect::<Result<_, ProviderError>>()?;
        rows.sort_by_key(|(i, _)| *i);
        Ok(rows.into_iter().map(|(_, v)| v).collect())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    use super::*;
    use crate::data::TimeSpan;
    use crate::providers::{embed, GenerationConfig, MediaAttachment, ProviderClient, RetryPolicy};

    /// Serves canned responses, one per connection, and returns the request
    /// bodies it saw.
    fn fake_server(responses: Vec<(u16, String)>) -> (String, std::thread::JoinHandle<Vec<(String, String)>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let mut seen = Vec::new();
            for (status, body) in responses {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream);
                let mut head = String::new();
                let mut length = 0;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        length = v.trim().parse().unwrap();
                    }
                    if line == "\r\n" {
                        break;
                    }
                    head.push_str(&line);
                }
                let mut buf = vec![0; length];
                reader.read_exact(&mut buf).unwrap();
                seen.push((head, String::from_utf8(buf).unwrap()));
                let reply = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                reader.get_mut().write_all(reply.as_bytes()).unwrap();
            }
            seen
        });
        (url, handle)
    }

    fn endpoint(url: &str) -> Endpoint {
        Endpoint {
            base_url: url.to_string(),
            api_key: Some("secret".into()),
            model: "m".into(),
            timeout: Duration::from_secs(10),
        }
    }

    #[test]
    fn gemini_round_trip_with_retry() {
        let ok = r#"{"candidates":[{"content":{"parts":[{"text":"나비가 "},{"text":"날아와"}]}}]}"#;
        let (url, server) = fake_server(vec![(429, "{}".into()), (200, ok.into())]);
        let provider = GeminiProvider::new(endpoint(&url)).unwrap();
        let client = ProviderClient::new(&provider).with_retry(RetryPolicy::no_delay(3));
        let span = TimeSpan::new(10_000, 14_500).unwrap();
        let request = GenerationRequest::new("t", "prompt", GenerationConfig::default())
            .with_media(vec![MediaAttachment::new(MediaKind::Video, "gs://b/clip.mp4", Some(span))]);
        assert_eq!(client.generate(&request).unwrap(), "나비가 날아와");
        let seen = server.join().unwrap();
        assert_eq!(seen.len(), 2);
        assert!(seen[1].0.starts_with("POST /models/m:generateContent"));
        assert!(seen[1].0.to_ascii_lowercase().contains("x-goog-api-key: secret"));
        let body: Value = serde_json::from_str(&seen[1].1).unwrap();
        assert_eq!(body["generationConfig"]["topK"], 40);
        assert_eq!(body["generationConfig"]["maxOutputTokens"], 8192);
        let parts = &body["contents"][0]["parts"];
        assert_eq!(parts[0]["fileData"]["mimeType"], "video/mp4");
        assert_eq!(parts[0]["videoMetadata"]["startOffset"], "10.000s");
        assert_eq!(parts[1]["text"], "prompt");
    }

    #[test]
    fn status_codes_map_to_error_kinds() {
        let (url, server) = fake_server(vec![(401, "{}".into()), (500, "{}".into()), (400, "{}".into())]);
        let provider = GeminiProvider::new(endpoint(&url)).unwrap();
        let request = GenerationRequest::new("t", "p", GenerationConfig::default());
        assert!(matches!(provider.generate(&request), Err(ProviderError::Auth(_))));
        assert!(matches!(provider.generate(&request), Err(ProviderError::Unavailable(_))));
        assert!(matches!(provider.generate(&request), Err(ProviderError::Contract(_))));
        server.join().unwrap();
    }

    #[test]
    fn chat_completions() {
        let ok = r#"{"choices":[{"message":{"role":"assistant","content":"{\"translation\": \"x\"}"}}]}"#;
        let (url, server) = fake_server(vec![(200, ok.into())]);
        let provider = ChatCompletionsProvider::new(endpoint(&url)).unwrap();
        let mut request = GenerationRequest::new("t", "p", GenerationConfig::qwen());
        request.push_turn(Role::Model, "draft");
        request.push_turn(Role::User, "fix it");
        assert_eq!(provider.generate(&request).unwrap(), "{\"translation\": \"x\"}");
        let seen = server.join().unwrap();
        assert!(seen[0].0.to_ascii_lowercase().contains("authorization: bearer secret"));
        let body: Value = serde_json::from_str(&seen[0].1).unwrap();
        assert_eq!(body["presence_penalty"], 1.05);
        assert_eq!(body["max_tokens"], 4096);
        assert_eq!(body["messages"][1]["role"], "assistant");
        assert_eq!(body["messages"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn embeddings_are_ordered_by_index() {
        let ok = r#"{"data":[{"index":1,"embedding":[0.0,1.0]},{"index":0,"embedding":[1.0,0.0]}]}"#;
        let (url, server) = fake_server(vec![(200, ok.into())]);
        let provider = HttpEmbeddingProvider::new(endpoint(&url)).unwrap();
        let v = embed(&provider, &EmbeddingRequest::new(vec!["a".into(), "b".into()], "")).unwrap();
        assert_eq!(v, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        server.join().unwrap();
    }

    #[test]
    fn configuration_from_lookup() {
        let vars: HashMap<&str, &str> = HashMap::from([("SINGABLE_GEMINI_API_KEY", "k")]);
        let lookup = |k: &str| vars.get(k).map(|v| v.to_string());
        let g = GeminiProvider::from_lookup(&lookup).unwrap();
        assert_eq!(g.id(), "gemini:gemini-2.0-flash");
        assert!(matches!(
            ChatCompletionsProvider::from_lookup(&lookup),
            Err(ProviderError::Config(_))
        ));
        assert!(matches!(GeminiProvider::from_lookup(&|_| None), Err(ProviderError::Config(_))));
    }
}
