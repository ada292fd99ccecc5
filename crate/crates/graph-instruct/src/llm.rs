//! Chain-of-Thought generators: the deterministic offline stub and a
//! chat-completions HTTP client with retries.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use graph_instruct_core::instruct::{offline_cot, CotPrompt};
use serde_json::{json, Value};

use crate::config::{LlmConfig, LlmMode};

const SYSTEM_PROMPT: &str = "You explain known answers about graph data. Answer with a short numbered \
                             Chain of Thought: identify the main concept, clarify task relevance, detail \
                             key attributes, trace structure, conclude.";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint answered HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response: {0}")]
    BadResponse(String),
    #[error("environment variable `{0}` is not set")]
    MissingApiKey(String),
}

impl LlmError {
    pub fn is_transport(&self) -> bool {
        matches!(self, LlmError::Transport { .. })
    }
}

pub trait CotGenerator: Sync {
    fn generate(&self, prompt: &CotPrompt) -> Result<String, LlmError>;
}

/// Deterministic generator reading only the structured prompt fields.
pub struct OfflineStub;

impl CotGenerator for OfflineStub {
    fn generate(&self, prompt: &CotPrompt) -> Result<String, LlmError> {
        Ok(offline_cot(&prompt.fields))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
}

impl RetryPolicy {
    /// Wait before retry number `retry` (0-based): doubling, capped.
    pub fn delay(&self, retry: u32) -> Duration {
        let factor = 1u32.checked_shl(retry.min(31)).unwrap_or(u32::MAX);
        self.initial_backoff
            .saturating_mul(factor)
            .min(self.max_backoff)
    }
}

pub struct RemoteClient {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    temperature: f64,
    max_tokens: u32,
    api_key: Option<String>,
    retry: RetryPolicy,
}

fn retriable(status: u16) -> bool {
    status == 408 || status == 429 || status >= 500
}

impl RemoteClient {
    pub fn new(cfg: &LlmConfig) -> Result<Self, LlmError> {
        let endpoint = cfg.endpoint.clone().unwrap_or_default();
        let api_key = if cfg.api_key_env.is_empty() {
            None
        } else {
            std::env::var(&cfg.api_key_env).ok()
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs.max(1))))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(RemoteClient {
            agent,
            endpoint,
            model: cfg.model.clone(),
            temperature: cfg.temperature,
            max_tokens: cfg.max_tokens,
            api_key,
            retry: RetryPolicy {
                max_retries: cfg.max_retries,
                initial_backoff: Duration::from_millis(cfg.initial_backoff_ms),
                max_backoff: Duration::from_millis(cfg.max_backoff_ms),
            },
        })
    }

    fn request_body(&self, prompt: &CotPrompt) -> Value {
        json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": prompt.text},
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        })
    }

    /// One HTTP exchange. `Err(Ok(_))` is worth retrying, `Err(Err(_))` is
    /// final.
    fn attempt(&self, body: &Value) -> Result<String, Result<String, LlmError>> {
        let mut req = self
            .agent
            .post(&self.endpoint)
            .header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = match req.send_json(body) {
            Ok(r) => r,
            Err(e) => return Err(Ok(e.to_string())),
        };
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Ok(e.to_string()))?;
        if retriable(status) {
            return Err(Ok(format!("HTTP {status}")));
        }
        if !(200..300).contains(&status) {
            return Err(Err(LlmError::Status { status, body: text }));
        }
        extract_content(&text).map_err(Err)
    }
}

/// Completion text from a chat (`choices[0].message.content`) or plain
/// (`choices[0].text`) response.
pub fn extract_content(text: &str) -> Result<String, LlmError> {
    let v: Value = serde_json::from_str(text).map_err(|e| LlmError::BadResponse(e.to_string()))?;
    let choice = &v["choices"][0];
    choice["message"]["content"]
        .as_str()
        .or_else(|| choice["text"].as_str())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| LlmError::BadResponse("no completion text in response".into()))
}

impl CotGenerator for RemoteClient {
    fn generate(&self, prompt: &CotPrompt) -> Result<String, LlmError> {
        let body = self.request_body(prompt);
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(Err(e)) => return Err(e),
                Err(Ok(message)) => {
                    if attempts > self.retry.max_retries {
                        return Err(LlmError::Transport { attempts, message });
                    }
                    thread::sleep(self.retry.delay(attempts - 1));
                }
            }
        }
    }
}

pub fn generator(cfg: &LlmConfig) -> Result<Box<dyn CotGenerator>, LlmError> {
    match cfg.mode {
        LlmMode::OfflineStub => Ok(Box::new(OfflineStub)),
        LlmMode::Remote => Ok(Box::new(RemoteClient::new(cfg)?)),
    }
}

/// Runs every prompt with at most `concurrency` requests in flight and
/// returns the completions in prompt order. The first error in prompt
/// order wins.
pub fn generate_all(
    generator: &dyn CotGenerator,
    prompts: &[CotPrompt],
    concurrency: usize,
) -> Result<Vec<String>, LlmError> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<String, LlmError>>>> =
        prompts.iter().map(|_| Mutex::new(None)).collect();
    let workers = concurrency.clamp(1, prompts.len().max(1));
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= prompts.len() {
                    break;
                }
                let r = generator.generate(&prompts[i]);
                let failed = r.is_err();
                *slots[i].lock().unwrap() = Some(r);
                if failed {
                    // stop handing out work; later slots stay empty
                    next.store(prompts.len(), Ordering::Relaxed);
                }
            });
        }
    });
    let mut out = Vec::with_capacity(prompts.len());
    let mut first_err = None;
    for slot in slots {
        match slot.into_inner().unwrap() {
            Some(Ok(t)) => out.push(t),
            Some(Err(e)) => {
                first_err.get_or_insert(e);
            }
            None => {}
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
