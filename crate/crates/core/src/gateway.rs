//! Chat-completion client for sending prompts to a hosted model.
//!
//! Two wire dialects are supported: OpenAI/OpenRouter-style
//! `/chat/completions` and Anthropic-style `/v1/messages`. Every exchange can
//! be appended to a JSON-lines log and replayed later without network
//! access.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::prompting::PromptDocument;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provider {
    OpenrouterCompatible,
    AnthropicCompatible,
    /// Speaks the OpenAI dialect against an injected transport; needs no key.
    Mock,
}

impl FromStr for Provider {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "openrouter" | "openrouter-compatible" | "openai" => Ok(Self::OpenrouterCompatible),
            "anthropic" | "anthropic-compatible" => Ok(Self::AnthropicCompatible),
            "mock" => Ok(Self::Mock),
            other => Err(Error::Config(format!("unknown provider {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub provider: Provider,
    pub model_name: String,
    pub temperature: f64,
    pub max_output_tokens: usize,
    pub context_window: usize,
    /// Fraction of `context_window` treated as usable, to absorb tokenizer
    /// mismatch with [`estimate_tokens`].
    pub window_margin: f64,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub base_url: String,
    pub timeout_secs: u64,
    pub retries: u32,
    /// First retry delay; doubles on each further attempt.
    pub backoff_base_ms: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::openrouter("openai/gpt-4o", 128_000)
    }
}

impl ModelConfig {
    pub fn openrouter(model: &str, context_window: usize) -> Self {
        Self {
            provider: Provider::OpenrouterCompatible,
            model_name: model.to_string(),
            temperature: 0.0,
            max_output_tokens: 1000,
            context_window,
            window_margin: 0.95,
            api_key_env: "OPENROUTER_API_KEY".into(),
            base_url: "https://openrouter.ai/api/v1".into(),
            timeout_secs: 300,
            retries: 3,
            backoff_base_ms: 1000,
        }
    }

    pub fn anthropic(model: &str, context_window: usize) -> Self {
        Self {
            provider: Provider::AnthropicCompatible,
            api_key_env: "ANTHROPIC_API_KEY".into(),
            base_url: "https://api.anthropic.com".into(),
            ..Self::openrouter(model, context_window)
        }
    }

    pub fn mock(context_window: usize) -> Self {
        Self {
            provider: Provider::Mock,
            model_name: "mock".into(),
            base_url: "mock://".into(),
            api_key_env: String::new(),
            backoff_base_ms: 1,
            ..Self::openrouter("mock", context_window)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.context_window == 0 {
            return Err(Error::Config("context window must be positive".into()));
        }
        if !(self.window_margin > 0.0 && self.window_margin <= 1.0) {
            return Err(Error::Config(format!(
                "window margin {} not in (0, 1]",
                self.window_margin
            )));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(Error::Config(format!(
                "temperature {} out of range",
                self.temperature
            )));
        }
        Ok(())
    }

    fn usable_window(&self) -> usize {
        (self.context_window as f64 * self.window_margin).floor() as usize
    }
}

/// Rough token count: one token per four bytes, rounded up. Tends to
/// overestimate for English prose and underestimate for dense numbers.
pub fn estimate_tokens(text: &str) -> usize {
    text.len().div_ceil(4)
}

/// Refuses prompts that cannot fit the model's window with room for the
/// answer.
pub fn preflight(prompt_text: &str, config: &ModelConfig) -> Result<usize> {
    let estimate = estimate_tokens(prompt_text);
    let window = config.usable_window();
    if estimate + config.max_output_tokens > window {
        return Err(Error::ContextOverflow {
            estimate,
            max_output: config.max_output_tokens,
            window,
        });
    }
    Ok(estimate)
}

pub fn prompt_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlmExchange {
    pub prompt_hash: String,
    pub prompt_text: String,
    pub response_text: String,
    pub input_token_estimate: usize,
    pub output_token_estimate: usize,
    pub provider: Provider,
    pub model: String,
    pub latency_ms: u64,
    pub http_status: u16,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// Append-only JSON-lines exchange log.
#[derive(Debug)]
pub struct ExchangeLog {
    path: PathBuf,
    writer: Mutex<()>,
}

impl ExchangeLog {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            writer: Mutex::new(()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, exchange: &LlmExchange) -> Result<()> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let mut line = serde_json::to_string(exchange)?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
        Ok(())
    }

    pub fn read_all(&self) -> Result<Vec<LlmExchange>> {
        read_exchanges(&self.path)
    }
}

pub fn read_exchanges(path: &Path) -> Result<Vec<LlmExchange>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Returns the most recent recorded response for exactly this prompt.
pub fn replay(exchange_log: &Path, prompt: &PromptDocument) -> Result<String> {
    let hash = prompt_hash(&prompt.rendered);
    read_exchanges(exchange_log)?
        .into_iter()
        .rev()
        .find(|ex| ex.prompt_hash == hash && ex.prompt_text == prompt.rendered)
        .map(|ex| ex.response_text)
        .ok_or(Error::ReplayMiss { hash })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
}

/// A failed request that never produced an HTTP status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportFailure {
    pub message: String,
    pub transient: bool,
}

pub trait Transport: Send + Sync {
    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &Value,
        timeout: Duration,
    ) -> std::result::Result<HttpReply, TransportFailure>;
}

/// Blocking HTTPS transport.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new() -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(Self { client })
    }
}

impl Transport for HttpTransport {
    fn post_json(
        &self,
        url: &str,
        headers: &[(String, String)],
        body: &Value,
        timeout: Duration,
    ) -> std::result::Result<HttpReply, TransportFailure> {
        let mut request = self.client.post(url).timeout(timeout).json(body);
        for (name, value) in headers {
            request = request.header(name, value);
        }
        let response = request.send().map_err(|e| TransportFailure {
            transient: e.is_timeout() || e.is_connect() || e.is_request(),
            message: e.to_string(),
        })?;
        let status = response.status().as_u16();
        let body = response.text().map_err(|e| TransportFailure {
            transient: true,
            message: e.to_string(),
        })?;
        Ok(HttpReply { status, body })
    }
}

/// Scripted transport for tests and offline runs. Replies are handed out in
/// order; the last one repeats once the script runs out.
#[derive(Debug, Default)]
pub struct MockTransport {
    script: Mutex<Vec<HttpReply>>,
    calls: Mutex<Vec<Value>>,
}

impl MockTransport {
    pub fn new(replies: Vec<HttpReply>) -> Self {
        Self {
            script: Mutex::new(replies),
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Always answers 200 with `text` as the assistant message.
    pub fn canned(text: &str) -> Self {
        Self::new(vec![Self::chat_reply(text)])
    }

    /// An OpenAI-style success body carrying `text`.
    pub fn chat_reply(text: &str) -> HttpReply {
        HttpReply {
            status: 200,
            body: json!({
                "id": "mock",
                "choices": [{"index": 0, "message": {"role": "assistant", "content": text}}],
                "usage": {"completion_tokens": estimate_tokens(text)}
            })
            .to_string(),
        }
    }

    pub fn status(code: u16) -> HttpReply {
        HttpReply {
            status: code,
            body: json!({"error": {"code": code}}).to_string(),
        }
    }

    /// Request bodies received so far.
    pub fn calls(&self) -> Vec<Value> {
        self.calls.lock().unwrap().clone()
    }
}

impl Transport for MockTransport {
    fn post_json(
        &self,
        _url: &str,
        _headers: &[(String, String)],
        body: &Value,
        _timeout: Duration,
    ) -> std::result::Result<HttpReply, TransportFailure> {
        self.calls.lock().unwrap().push(body.clone());
        let mut script = self.script.lock().unwrap();
        match script.len() {
            0 => Err(TransportFailure {
                message: "mock transport has no scripted reply".into(),
                transient: false,
            }),
            1 => Ok(script[0].clone()),
            _ => Ok(script.remove(0)),
        }
    }
}

/// Sends prompts to one configured model and records the exchanges.
pub struct LlmClient<T: Transport> {
    config: ModelConfig,
    transport: T,
    log: Option<ExchangeLog>,
    exchanges: Vec<LlmExchange>,
}

impl<T: Transport> LlmClient<T> {
    pub fn new(config: ModelConfig, transport: T) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            transport,
            log: None,
            exchanges: Vec::new(),
        })
    }

    /// Also append every exchange to a JSON-lines file.
    pub fn with_log(mut self, log: ExchangeLog) -> Self {
        self.log = Some(log);
        self
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    /// Exchanges completed by this client, oldest first.
    pub fn exchanges(&self) -> &[LlmExchange] {
        &self.exchanges
    }

    /// Sends the prompt and returns the assistant's text.
    pub fn execute(&mut self, prompt: &PromptDocument) -> Result<String> {
        let input_estimate = preflight(&prompt.rendered, &self.config)?;
        let api_key = self.api_key()?;
        let (url, headers, body) = self.request(&prompt.rendered, api_key.as_deref());
        let timeout = Duration::from_secs(self.config.timeout_secs);

        let started = Instant::now();
        let mut attempt = 0u32;
        let reply = loop {
            let outcome = self.transport.post_json(&url, &headers, &body, timeout);
            let retry_reason = match &outcome {
                Ok(reply) if reply.status == 429 || reply.status >= 500 => {
                    format!("HTTP {}", reply.status)
                }
                Ok(_) => break outcome.unwrap(),
                Err(f) if f.transient => f.message.clone(),
                Err(f) => return Err(Error::Transport(f.message.clone())),
            };
            if attempt >= self.config.retries {
                return Err(Error::Transport(format!(
                    "giving up after {} attempts: {retry_reason}",
                    attempt + 1
                )));
            }
            let delay = self.config.backoff_base_ms.saturating_mul(1 << attempt.min(16));
            warn!("transient failure ({retry_reason}); retrying in {delay} ms");
            std::thread::sleep(Duration::from_millis(delay));
            attempt += 1;
        };
        let latency_ms = started.elapsed().as_millis() as u64;

        match reply.status {
            200..=299 => {}
            401 | 403 => {
                return Err(Error::Credential(format!(
                    "provider rejected the API key (HTTP {})",
                    reply.status
                )))
            }
            status => {
                return Err(Error::Transport(format!(
                    "HTTP {status}: {}",
                    truncate(&reply.body, 500)
                )))
            }
        }
        let text = self.extract_text(&reply.body)?;
        debug!("received {} bytes from {}", text.len(), self.config.model_name);

        let exchange = LlmExchange {
            prompt_hash: prompt_hash(&prompt.rendered),
            prompt_text: prompt.rendered.clone(),
            response_text: text.clone(),
            input_token_estimate: input_estimate,
            output_token_estimate: estimate_tokens(&text),
            provider: self.config.provider,
            model: self.config.model_name.clone(),
            latency_ms,
            http_status: reply.status,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or_default(),
        };
        if let Some(log) = &self.log {
            log.append(&exchange)?;
        }
        self.exchanges.push(exchange);
        Ok(text)
    }

    fn api_key(&self) -> Result<Option<String>> {
        if self.config.provider == Provider::Mock {
            return Ok(None);
        }
        let var = &self.config.api_key_env;
        match std::env::var(var) {
            Ok(key) if !key.trim().is_empty() => Ok(Some(key)),
            _ => Err(Error::Credential(format!(
                "environment variable {var} is not set"
            ))),
        }
    }

    fn request(&self, prompt: &str, api_key: Option<&str>) -> (String, Vec<(String, String)>, Value) {
        let cfg = &self.config;
        let base = cfg.base_url.trim_end_matches('/');
        let messages = json!([{"role": "user", "content": prompt}]);
        match cfg.provider {
            Provider::AnthropicCompatible => (
                format!("{base}/v1/messages"),
                vec![
                    ("x-api-key".into(), api_key.unwrap_or_default().into()),
                    ("anthropic-version".into(), "2023-06-01".into()),
                ],
                json!({
                    "model": cfg.model_name,
                    "max_tokens": cfg.max_output_tokens,
                    "temperature": cfg.temperature,
                    "messages": messages,
                }),
            ),
            Provider::OpenrouterCompatible | Provider::Mock => {
                let mut headers = Vec::new();
                if let Some(key) = api_key {
                    headers.push(("Authorization".into(), format!("Bearer {key}")));
                }
                (
                    format!("{base}/chat/completions"),
                    headers,
                    json!({
                        "model": cfg.model_name,
                        "max_tokens": cfg.max_output_tokens,
                        "temperature": cfg.temperature,
                        "messages": messages,
                    }),
                )
            }
        }
    }

    fn extract_text(&self, body: &str) -> Result<String> {
        let value: Value = serde_json::from_str(body)
            .map_err(|e| Error::Transport(format!("response is not JSON: {e}")))?;
        let text = match self.config.provider {
            Provider::AnthropicCompatible => value["content"].as_array().map(|blocks| {
                blocks
                    .iter()
                    .filter_map(|b| b["text"].as_str())
                    .collect::<Vec<_>>()
                    .join("")
            }),
            _ => value["choices"][0]["message"]["content"]
                .as_str()
                .map(str::to_string),
        };
        text.ok_or_else(|| {
            Error::Transport(format!(
                "response has no message text: {}",
                truncate(body, 300)
            ))
        })
    }
}

impl LlmClient<HttpTransport> {
    pub fn http(config: ModelConfig) -> Result<Self> {
        Self::new(config, HttpTransport::new()?)
    }
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((idx, _)) => &s[..idx],
        None => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> PromptDocument {
        PromptDocument {
            problem_text: None,
            example_block: None,
            evaluation_block: vec![],
            rules_text: String::new(),
            rendered: text.to_string(),
        }
    }

    #[test]
    fn token_estimates() {
        assert_eq!(estimate_tokens(""), 0);
        assert_eq!(estimate_tokens(&"a".repeat(400)), 100);
        assert_eq!(estimate_tokens("abcde"), 2);
    }

    #[test]
    fn canned_mock_returns_verbatim() {
        let mut client = LlmClient::new(ModelConfig::mock(10_000), MockTransport::canned("alpha_1 = 0.2"))
            .unwrap();
        let prompt = doc("hello");
        let before = prompt.clone();
        assert_eq!(client.execute(&prompt).unwrap(), "alpha_1 = 0.2");
        assert_eq!(client.exchanges().len(), 1);
        assert_eq!(prompt, before);
        let sent = &client.transport().calls()[0];
        assert_eq!(sent["temperature"], 0.0);
        assert_eq!(sent["max_tokens"], 1000);
        assert_eq!(sent["messages"][0]["content"], "hello");
    }

    #[test]
    fn retries_transient_then_succeeds() {
        let transport = MockTransport::new(vec![
            MockTransport::status(429),
            MockTransport::chat_reply("ok"),
        ]);
        let mut client = LlmClient::new(ModelConfig::mock(10_000), transport).unwrap();
        assert_eq!(client.execute(&doc("p")).unwrap(), "ok");
        assert_eq!(client.transport().calls().len(), 2);
    }

    #[test]
    fn exhausted_retries_is_transport_error() {
        let cfg = ModelConfig {
            retries: 2,
            ..ModelConfig::mock(10_000)
        };
        let mut client = LlmClient::new(cfg, MockTransport::new(vec![MockTransport::status(503)])).unwrap();
        assert!(matches!(client.execute(&doc("p")), Err(Error::Transport(_))));
        assert_eq!(client.transport().calls().len(), 3);
        assert!(client.exchanges().is_empty());
    }

    #[test]
    fn auth_failure_is_credential_error() {
        let mut client =
            LlmClient::new(ModelConfig::mock(10_000), MockTransport::new(vec![MockTransport::status(401)]))
                .unwrap();
        assert!(matches!(client.execute(&doc("p")), Err(Error::Credential(_))));
        assert_eq!(client.transport().calls().len(), 1);
    }

    #[test]
    fn missing_key_is_refused_before_sending() {
        let cfg = ModelConfig {
            api_key_env: "KDDS_TEST_KEY_THAT_IS_NOT_SET".into(),
            ..ModelConfig::openrouter("x", 10_000)
        };
        let mut client = LlmClient::new(cfg, MockTransport::canned("x")).unwrap();
        assert!(matches!(client.execute(&doc("p")), Err(Error::Credential(_))));
        assert!(client.transport().calls().is_empty());
    }

    #[test]
    fn overflow_is_refused_before_sending() {
        // 181,719 estimated tokens against a 128,000 window
        let text = "x".repeat(181_719 * 4);
        assert_eq!(estimate_tokens(&text), 181_719);
        let mut client = LlmClient::new(ModelConfig::mock(128_000), MockTransport::canned("x")).unwrap();
        match client.execute(&doc(&text)) {
            Err(Error::ContextOverflow { estimate, .. }) => assert_eq!(estimate, 181_719),
            other => panic!("{other:?}"),
        }
        assert!(client.transport().calls().is_empty());
    }

    #[test]
    fn anthropic_dialect() {
        let transport = MockTransport::new(vec![HttpReply {
            status: 200,
            body: json!({"content": [{"type": "text", "text": "part one "}, {"type": "text", "text": "two"}]})
                .to_string(),
        }]);
        std::env::set_var("KDDS_TEST_ANTHROPIC_KEY", "k");
        let cfg = ModelConfig {
            api_key_env: "KDDS_TEST_ANTHROPIC_KEY".into(),
            ..ModelConfig::anthropic("claude-3-opus-20240229", 200_000)
        };
        let mut client = LlmClient::new(cfg, transport).unwrap();
        assert_eq!(client.execute(&doc("p")).unwrap(), "part one two");
        let body = &client.transport().calls()[0];
        assert_eq!(body["model"], "claude-3-opus-20240229");
        assert_eq!(body["max_tokens"], 1000);
    }

    #[test]
    fn record_and_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        let mut client = LlmClient::new(ModelConfig::mock(10_000), MockTransport::canned("answer"))
            .unwrap()
            .with_log(ExchangeLog::new(&path));
        let prompt = doc("the prompt");
        client.execute(&prompt).unwrap();
        assert_eq!(replay(&path, &prompt).unwrap(), "answer");
        assert!(matches!(
            replay(&path, &doc("the prompT")),
            Err(Error::ReplayMiss { .. })
        ));
        let records = read_exchanges(&path).unwrap();
        assert_eq!(records, client.exchanges());
    }

    #[test]
    fn provider_names() {
        assert_eq!("mock".parse::<Provider>().unwrap(), Provider::Mock);
        assert_eq!(
            "anthropic".parse::<Provider>().unwrap(),
            Provider::AnthropicCompatible
        );
        assert!("bard".parse::<Provider>().is_err());
        assert_eq!(
            serde_json::to_string(&Provider::OpenrouterCompatible).unwrap(),
            "\"openrouter-compatible\""
        );
    }
}
