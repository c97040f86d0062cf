//! HTTP embedding provider. POSTs a model name plus a list of input texts
//! and expects a list of float arrays aligned with the inputs.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbedError, Vector};

/// Environment variable holding the bearer token for the embedding endpoint.
pub const EMBED_API_KEY_VAR: &str = "IDEABENCH_EMBED_API_KEY";

#[derive(Debug, Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    input: Vec<&'a str>,
}

#[derive(Debug, Deserialize)]
struct EmbedResponse {
    embeddings: Vec<Vec<f64>>,
}

/// Bounded retry with exponential backoff and jitter. Endpoint rate limits
/// and transient 5xx responses are retried; other client errors are not.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            initial_backoff: Duration::from_secs(1),
        }
    }
}

impl RetryPolicy {
    /// Policy with no sleep between attempts, for tests.
    pub fn immediate(max_attempts: u32) -> Self {
        Self {
            max_attempts,
            initial_backoff: Duration::ZERO,
        }
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let base = self.initial_backoff.as_secs_f64() * f64::from(1 << attempt.min(16));
        let jitter = 0.5 + rand::random::<f64>();
        Duration::from_secs_f64(base * jitter)
    }
}

pub(super) struct RemoteClient {
    agent: ureq::Agent,
    endpoint_url: String,
    model_name: String,
    api_key: Option<String>,
    retry: RetryPolicy,
}

impl RemoteClient {
    pub(super) fn new(endpoint_url: &str, model_name: &str, retry: RetryPolicy) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .new_agent();
        Self {
            agent,
            endpoint_url: endpoint_url.to_string(),
            model_name: model_name.to_string(),
            api_key: std::env::var(EMBED_API_KEY_VAR).ok(),
            retry,
        }
    }

    pub(super) fn embed(&self, text: &str) -> Result<Vector, EmbedError> {
        let body = EmbedRequest {
            model: &self.model_name,
            input: vec![text],
        };
        let response = self.post_with_retries(&body)?;
        let [components] = <[Vec<f64>; 1]>::try_from(response.embeddings).map_err(|got| {
            EmbedError::provider(format!("expected 1 embedding, got {}", got.len()))
        })?;
        if components.is_empty() {
            return Err(EmbedError::provider("endpoint returned an empty vector"));
        }
        Vector::normalized(components)
    }

    fn post_with_retries(&self, body: &EmbedRequest<'_>) -> Result<EmbedResponse, EmbedError> {
        let mut last_error = String::new();
        for attempt in 0..self.retry.max_attempts {
            if attempt > 0 {
                std::thread::sleep(self.retry.backoff(attempt - 1));
            }
            let mut request = self.agent.post(&self.endpoint_url);
            if let Some(key) = &self.api_key {
                request = request.header("authorization", format!("Bearer {key}"));
            }
            match request.send_json(body) {
                Ok(mut response) => {
                    return response
                        .body_mut()
                        .read_json::<EmbedResponse>()
                        .map_err(|e| EmbedError::provider(format!("bad response body: {e}")));
                }
                Err(ureq::Error::StatusCode(code)) if code == 429 || code >= 500 => {
                    last_error = format!("http status {code}");
                }
                Err(ureq::Error::StatusCode(code)) => {
                    return Err(EmbedError::provider(format!("http status {code}")));
                }
                Err(e) => {
                    last_error = e.to_string();
                }
            }
        }
        Err(EmbedError::provider(format!(
            "{} after {} attempts: {last_error}",
            self.endpoint_url, self.retry.max_attempts
        )))
    }
}
