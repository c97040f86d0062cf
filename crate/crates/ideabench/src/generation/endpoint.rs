//! Chat-completion endpoint abstraction: an HTTP client for real runs and
//! whatever scripted stand-ins tests provide.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::GenError;
use crate::embedding::RetryPolicy;

/// Environment variable holding the chat endpoint base URL.
pub const LLM_URL_VAR: &str = "IDEABENCH_LLM_URL";
/// Environment variable holding the chat endpoint bearer token.
pub const LLM_API_KEY_VAR: &str = "IDEABENCH_LLM_API_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub top_p: f64,
}

/// A conversational completion backend. Implementations must be usable from
/// multiple sessions at once.
pub trait ChatEndpoint: Sync {
    /// Returns the generated assistant text for the conversation so far.
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError>;

    /// Short label recorded in pool provenance.
    fn label(&self) -> String;
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Debug, Deserialize)]
struct ResponseMessage {
    content: String,
}

/// OpenAI-style chat completions client. Base URL comes from
/// `IDEABENCH_LLM_URL`, the bearer token from `IDEABENCH_LLM_API_KEY`.
pub struct HttpChatEndpoint {
    agent: ureq::Agent,
    url: String,
    api_key: Option<String>,
    retry: RetryPolicy,
}

impl HttpChatEndpoint {
    pub fn from_env() -> Result<Self, GenError> {
        let url = std::env::var(LLM_URL_VAR)
            .map_err(|_| GenError::Input(format!("environment variable {LLM_URL_VAR} is not set")))?;
        Ok(Self::new(url, std::env::var(LLM_API_KEY_VAR).ok(), RetryPolicy::default()))
    }

    pub fn new(url: impl Into<String>, api_key: Option<String>, retry: RetryPolicy) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(600)))
            .build()
            .new_agent();
        Self {
            agent,
            url: url.into(),
            api_key,
            retry,
        }
    }
}

impl ChatEndpoint for HttpChatEndpoint {
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError> {
        let mut last_error = String::new();
        for attempt in 0..self.retry.max_attempts {
            if attempt > 0 {
                let base = self.retry.initial_backoff.as_secs_f64() * f64::from(1 << (attempt - 1).min(16));
                let jitter = 0.5 + rand::random::<f64>();
                std::thread::sleep(Duration::from_secs_f64(base * jitter));
            }
            let mut call = self.agent.post(&self.url);
            if let Some(key) = &self.api_key {
                call = call.header("authorization", format!("Bearer {key}"));
            }
            match call.send_json(request) {
                Ok(mut response) => {
                    let parsed: ChatResponse = response
                        .body_mut()
                        .read_json()
                        .map_err(|e| GenError::Provider(format!("bad response body: {e}")))?;
                    return parsed
                        .choices
                        .into_iter()
                        .next()
                        .map(|c| c.message.content)
                        .ok_or_else(|| GenError::Provider("response carried no choices".to_string()));
                }
                Err(ureq::Error::StatusCode(code)) if code == 429 || code >= 500 => {
                    last_error = format!("http status {code}");
                }
                Err(ureq::Error::StatusCode(code)) => {
                    return Err(GenError::Provider(format!("http status {code}")));
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(GenError::Provider(format!(
            "{} after {} attempts: {last_error}",
            self.url, self.retry.max_attempts
        )))
    }

    fn label(&self) -> String {
        self.url.clone()
    }
}
