//! Deterministic in-process providers for offline runs and tests.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{GenerationProvider, GenerationRequest, ProviderError};

/// One scripted outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MockReply {
    Text(String),
    Error { error: MockErrorKind, #[serde(default)] message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MockErrorKind {
    Auth,
    RateLimited,
    Timeout,
    Unavailable,
    Contract,
}

impl MockReply {
    pub fn text(t: impl Into<String>) -> Self {
        MockReply::Text(t.into())
    }

    pub fn error(e: ProviderError) -> Self {
        let (error, message) = match e {
            ProviderError::Auth(m) => (MockErrorKind::Auth, m),
            ProviderError::RateLimited(m) => (MockErrorKind::RateLimited, m),
            ProviderError::Timeout(m) => (MockErrorKind::Timeout, m),
            ProviderError::Unavailable(m) => (MockErrorKind::Unavailable, m),
            other => (MockErrorKind::Contract, other.to_string()),
        };
        MockReply::Error { error, message }
    }

    fn outcome(&self) -> Result<String, ProviderError> {
        match self {
            MockReply::Text(t) => Ok(t.clone()),
            MockReply::Error { error, message } => Err(match error {
                MockErrorKind::Auth => ProviderError::Auth(message.clone()),
                MockErrorKind::RateLimited => ProviderError::RateLimited(message.clone()),
                MockErrorKind::Timeout => ProviderError::Timeout(message.clone()),
                MockErrorKind::Unavailable => ProviderError::Unavailable(message.clone()),
                MockErrorKind::Contract => ProviderError::Contract(message.clone()),
            }),
        }
    }
}

fn pick(replies: &[MockReply], cursor: usize) -> Result<String, ProviderError> {
    match replies.get(cursor).or(replies.last()) {
        Some(r) => r.outcome(),
        None => Err(ProviderError::Contract("mock has no scripted reply".into())),
    }
}

/// Replays one sequence of replies regardless of the request; the last
/// reply repeats once the script runs out.
#[derive(Debug)]
pub struct ScriptedProvider {
    replies: Vec<MockReply>,
    calls: Mutex<usize>,
}

impl ScriptedProvider {
    pub fn new(replies: Vec<MockReply>) -> Self {
        Self {
            replies,
            calls: Mutex::new(0),
        }
    }

    pub fn texts<S: Into<String>>(texts: impl IntoIterator<Item = S>) -> Self {
        Self::new(texts.into_iter().map(MockReply::text).collect())
    }

    pub fn calls(&self) -> usize {
        *self.calls.lock().expect("mock poisoned")
    }
}

impl GenerationProvider for ScriptedProvider {
    fn id(&self) -> String {
        "mock-scripted".into()
    }

    fn generate(&self, _: &GenerationRequest) -> Result<String, ProviderError> {
        let mut calls = self.calls.lock().expect("mock poisoned");
        let cursor = *calls;
        *calls += 1;
        pick(&self.replies, cursor)
    }
}

/// A rule answering prompts that contain `contains`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    pub contains: String,
    pub replies: Vec<MockReply>,
}

/// File format of a mock script.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockScript {
    #[serde(default)]
    pub rules: Vec<MockRule>,
    /// Replies for prompts no rule matches.
    #[serde(default)]
    pub default: Vec<MockReply>,
}

impl MockScript {
    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ProviderError::Config(format!("mock script {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ProviderError::Config(format!("mock script {}: {e}", path.display())))
    }
}

/// Answers by matching the prompt against rules; the longest matching
/// `contains` wins, earlier rules break ties. Each (rule, task id) pair keeps
/// its own cursor, so concurrent tasks and repeated runs see the same
/// sequence.
#[derive(Debug)]
pub struct KeyedMockProvider {
    script: MockScript,
    cursors: Mutex<HashMap<(Option<usize>, String), usize>>,
}

impl KeyedMockProvider {
    pub fn new(script: MockScript) -> Self {
        Self {
            script,
            cursors: Mutex::new(HashMap::new()),
        }
    }

    fn rule_for(&self, prompt: &str) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, rule) in self.script.rules.iter().enumerate() {
            if prompt.contains(&rule.contains)
                && best.is_none_or(|b| rule.contains.len() > self.script.rules[b].contains.len())
            {
                best = Some(i);
            }
        }
        best
    }
}

impl GenerationProvider for KeyedMockProvider {
    fn id(&self) -> String {
        "mock-keyed".into()
    }

    fn generate(&self, request: &GenerationRequest) -> Result<String, ProviderError> {
        let rule = self.rule_for(request.prompt_text());
        let cursor = {
            let mut cursors = self.cursors.lock().expect("mock poisoned");
            let c = cursors.entry((rule, request.task_id.clone())).or_insert(0);
            *c += 1;
            *c - 1
        };
        let replies = match rule {
            Some(i) => &self.script.rules[i].replies,
            None => &self.script.default,
        };
        pick(replies, cursor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::GenerationConfig;

    fn req(task: &str, prompt: &str) -> GenerationRequest {
        GenerationRequest::new(task, prompt, GenerationConfig::default())
    }

    #[test]
    fn scripted_sequence_repeats_last() {
        let m = ScriptedProvider::texts(["a", "b"]);
        let r = req("t", "p");
        let got: Vec<_> = (0..4).map(|_| m.generate(&r).unwrap()).collect();
        assert_eq!(got, ["a", "b", "b", "b"]);
    }

    #[test]
    fn same_script_same_sequence() {
        let run = || {
            let m = ScriptedProvider::texts(["x", "y", "z"]);
            (0..3).map(|_| m.generate(&req("t", "p")).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn keyed_rules() {
        let script: MockScript = serde_json::from_str(
            r#"{
              "rules": [
                {"contains": "butterfly", "replies": ["short"]},
                {"contains": "there's a butterfly", "replies": ["one", {"error": "timeout"}, "two"]}
              ],
              "default": ["fallback"]
            }"#,
        )
        .unwrap();
        let m = KeyedMockProvider::new(script);
        let p = "Original Lyrics:\nAnd there's a butterfly";
        assert_eq!(m.generate(&req("a", p)).unwrap(), "one");
        assert!(matches!(m.generate(&req("a", p)), Err(ProviderError::Timeout(_))));
        assert_eq!(m.generate(&req("a", p)).unwrap(), "two");
        assert_eq!(m.generate(&req("a", p)).unwrap(), "two");
        // a fresh task starts at the top of the rule
        assert_eq!(m.generate(&req("b", p)).unwrap(), "one");
        assert_eq!(m.generate(&req("a", "a lone butterfly")).unwrap(), "short");
        assert_eq!(m.generate(&req("a", "nothing")).unwrap(), "fallback");
    }

    #[test]
    fn empty_script_is_a_contract_error() {
        let m = KeyedMockProvider::new(MockScript::default());
        assert!(matches!(m.generate(&req("a", "p")), Err(ProviderError::Contract(_))));
    }

    #[test]
    fn script_round_trips() {
        let script = MockScript {
            rules: vec![MockRule {
                contains: "x".into(),
                replies: vec![MockReply::text("t"), MockReply::error(ProviderError::RateLimited("r".into()))],
            }],
            default: vec![],
        };
        let json = serde_json::to_string(&script).unwrap();
        assert_eq!(serde_json::from_str::<MockScript>(&json).unwrap(), script);
    }
}
