//! Blocking JSON-over-HTTP client shared by all remote scorers.

use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    pub url: String,
    #[serde(default = "EndpointConfig::default_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "EndpointConfig::default_retries")]
    pub retries: u32,
    /// Initial backoff; doubled after each failed attempt.
    #[serde(default = "EndpointConfig::default_backoff")]
    pub backoff_ms: u64,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>) -> Self {
        EndpointConfig {
            url: url.into(),
            timeout_secs: Self::default_timeout(),
            retries: Self::default_retries(),
            backoff_ms: Self::default_backoff(),
        }
    }

    pub fn with_timeout(mut self, secs: f64) -> Self {
        self.timeout_secs = secs;
        self
    }

    pub fn with_retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }

    fn default_timeout() -> f64 {
        30.0
    }

    fn default_retries() -> u32 {
        2
    }

    fn default_backoff() -> u64 {
        250
    }
}

/// A `ureq` agent bound to one endpoint. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct JsonClient {
    config: EndpointConfig,
    agent: ureq::Agent,
    bearer: Option<String>,
}

impl JsonClient {
    pub fn new(config: EndpointConfig) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs_f64(config.timeout_secs.max(0.001)))
            .build();
        JsonClient {
            config,
            agent,
            bearer: None,
        }
    }

    pub fn with_bearer(mut self, token: Option<String>) -> Self {
        self.bearer = token;
        self
    }

    pub fn url(&self) -> &str {
        &self.config.url
    }

    fn remote(&self, message: impl Into<String>) -> Error {
        Error::Remote {
            endpoint: self.config.url.clone(),
            message: message.into(),
        }
    }

    /// POSTs `body` and decodes the response, retrying transport failures
    /// and 5xx/429 responses with exponential backoff. Other 4xx responses
    /// and undecodable bodies fail immediately.
    pub fn post<B: Serialize, R: DeserializeOwned>(&self, body: &B) -> Result<R> {
        let payload = serde_json::to_value(body)
            .map_err(|e| self.remote(format!("cannot encode request: {e}")))?;
        let mut backoff = Duration::from_millis(self.config.backoff_ms);
        let mut attempt = 0;
        loop {
            let mut req = self.agent.post(&self.config.url);
            if let Some(token) = &self.bearer {
                req = req.set("Authorization", &format!("Bearer {token}"));
            }
            let failure = match req.send_json(payload.clone()) {
                Ok(resp) => {
                    return resp
                        .into_json::<R>()
                        .map_err(|e| self.remote(format!("malformed response: {e}")));
                }
                Err(ureq::Error::Status(code, resp)) => {
                    let body = resp.into_string().unwrap_or_default();
                    let msg = format!("HTTP {code}: {}", body.chars().take(200).collect::<String>());
                    if code != 429 && code < 500 {
                        return Err(self.remote(msg));
                    }
                    msg
                }
                Err(ureq::Error::Transport(t)) => t.to_string(),
            };
            if attempt >= self.config.retries {
                return Err(self.remote(format!(
                    "{failure} (after {} attempt(s))",
                    attempt + 1
                )));
            }
            log::warn!(
                "{}: attempt {} failed: {failure}; retrying in {:?}",
                self.config.url,
                attempt + 1,
                backoff
            );
            std::thread::sleep(backoff);
            backoff *= 2;
            attempt += 1;
        }
    }
}
