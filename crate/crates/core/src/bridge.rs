//! Blocking JSON-over-HTTP client shared by the remote scorer and the
//! remote fill-mask provider.

use serde::Serialize;
use serde_json::Value;
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("bridge unavailable: {0}")]
    Unavailable(String),
    #[error("bridge protocol error: {0}")]
    Protocol(String),
}

/// Base address of a bridge service, e.g. `http://127.0.0.1:8000`.
#[derive(Debug, Clone)]
pub struct ServiceAddress {
    base: String,
    agent: ureq::Agent,
}

impl ServiceAddress {
    pub fn new(base: impl Into<String>) -> Self {
        Self::with_timeout(base, Duration::from_secs(60))
    }

    pub fn with_timeout(base: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        ServiceAddress {
            base: base.into().trim_end_matches('/').to_string(),
            agent,
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    /// POSTs `body` to `path` and returns the decoded JSON object.
    /// Connection failures and 503 map to `Unavailable`; any other
    /// non-success status or a non-JSON body is a protocol error.
    pub fn post_json(&self, path: &str, body: &impl Serialize) -> Result<Value, BridgeError> {
        let url = format!("{}{}", self.base, path);
        let mut resp = self.agent.post(&url).send_json(body).map_err(|e| match e {
            ureq::Error::Io(_)
            | ureq::Error::ConnectionFailed
            | ureq::Error::HostNotFound
            | ureq::Error::Timeout(_) => BridgeError::Unavailable(format!("{url}: {e}")),
            other => BridgeError::Protocol(format!("{url}: {other}")),
        })?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| BridgeError::Protocol(format!("{url}: unreadable body: {e}")))?;
        match status {
            200..=299 => {}
            503 => return Err(BridgeError::Unavailable(format!("{url}: service not ready (503)"))),
            s => return Err(BridgeError::Protocol(format!("{url}: HTTP {s}: {}", text.trim()))),
        }
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| BridgeError::Protocol(format!("{url}: invalid JSON: {e}")))?;
        if !value.is_object() {
            return Err(BridgeError::Protocol(format!("{url}: response is not a JSON object")));
        }
        Ok(value)
    }
}
