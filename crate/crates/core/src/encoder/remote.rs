//! HTTP client for the v1 embedding protocol.

use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use super::protocol::{
    encode_image, EmbedRequest, ErrorBody, HealthResponse, LenientEmbedResponse, EMBED_PATH,
    HEALTH_PATH, PROTOCOL_VERSION,
};
use super::{Encoder, EncoderError, EncoderInput, Health};
use crate::domain::EmbeddingVector;

/// Responses larger than this are rejected.
const MAX_RESPONSE_BYTES: u64 = 512 * 1024 * 1024;

/// Retries apply to transport failures only; protocol violations and HTTP
/// error statuses are returned immediately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            initial_backoff: Duration::from_millis(250),
        }
    }
}

struct Semaphore {
    available: Mutex<usize>,
    freed: Condvar,
}

impl Semaphore {
    fn new(permits: usize) -> Self {
        Semaphore {
            available: Mutex::new(permits.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut n = self.available.lock().unwrap_or_else(|e| e.into_inner());
        while *n == 0 {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n -= 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a Semaphore);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.available.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.freed.notify_one();
    }
}

enum Failure {
    Transport(String),
    Fatal(EncoderError),
}

/// Client for a remote encoder. Safe to share across threads; at most
/// `max_in_flight` requests are outstanding at once.
pub struct RemoteEncoder {
    endpoint: String,
    agent: ureq::Agent,
    retry: RetryPolicy,
    in_flight: Semaphore,
}

impl RemoteEncoder {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self::with_options(endpoint, RetryPolicy::default(), 4, Duration::from_secs(300))
    }

    pub fn with_options(
        endpoint: impl Into<String>,
        retry: RetryPolicy,
        max_in_flight: usize,
        timeout: Duration,
    ) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        RemoteEncoder {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            agent,
            retry,
            in_flight: Semaphore::new(max_in_flight),
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.endpoint, path)
    }

    fn with_retries<T>(
        &self,
        mut attempt: impl FnMut() -> Result<T, Failure>,
    ) -> Result<T, EncoderError> {
        let mut backoff = self.retry.initial_backoff;
        let mut last = String::new();
        for i in 0..self.retry.attempts.max(1) {
            if i > 0 {
                thread::sleep(backoff);
                backoff *= 2;
            }
            match attempt() {
                Ok(v) => return Ok(v),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Transport(msg)) => last = msg,
            }
        }
        Err(EncoderError::Transport {
            endpoint: self.endpoint.clone(),
            message: last,
        })
    }

    fn classify(&self, err: ureq::Error) -> Failure {
        match err {
            ureq::Error::Io(_)
            | ureq::Error::Timeout(_)
            | ureq::Error::HostNotFound
            | ureq::Error::ConnectionFailed => Failure::Transport(err.to_string()),
            ureq::Error::Protocol(_) => Failure::Fatal(self.violation(err.to_string())),
            other => Failure::Fatal(EncoderError::Transport {
                endpoint: self.endpoint.clone(),
                message: other.to_string(),
            }),
        }
    }

    fn violation(&self, message: impl Into<String>) -> EncoderError {
        EncoderError::ProtocolViolation {
            endpoint: self.endpoint.clone(),
            message: message.into(),
        }
    }

    /// Reads the body; statuses >= 400 become [`EncoderError::Remote`].
    fn read_body(&self, mut resp: ureq::http::Response<ureq::Body>) -> Result<String, Failure> {
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .with_config()
            .limit(MAX_RESPONSE_BYTES)
            .read_to_string()
            .map_err(|e| self.classify(e))?;
        if status >= 400 {
            let (code, message) = match serde_json::from_str::<ErrorBody>(&body) {
                Ok(b) => (b.error.code, b.error.message),
                Err(_) => ("unknown".to_string(), body),
            };
            return Err(Failure::Fatal(EncoderError::Remote {
                endpoint: self.endpoint.clone(),
                status,
                code,
                message,
            }));
        }
        Ok(body)
    }
}

impl Encoder for RemoteEncoder {
    fn health(&self) -> Result<Health, EncoderError> {
        let _permit = self.in_flight.acquire();
        let body = self.with_retries(|| {
            let resp = self
                .agent
                .get(&self.url(HEALTH_PATH))
                .call()
                .map_err(|e| self.classify(e))?;
            self.read_body(resp)
        })?;
        let health: HealthResponse = serde_json::from_str(&body)
            .map_err(|e| self.violation(format!("bad health body: {e}")))?;
        if health.protocol_version != PROTOCOL_VERSION {
            return Err(self.violation(format!(
                "unsupported protocol version {:?}",
                health.protocol_version
            )));
        }
        Ok(Health {
            dim: health.dim,
            protocol_version: health.protocol_version,
        })
    }

    fn embed(&self, batch: &[EncoderInput<'_>]) -> Result<Vec<EmbeddingVector>, EncoderError> {
        let request = EmbedRequest {
            images: batch.iter().map(|v| encode_image(v.pixels)).collect(),
        };
        let payload = serde_json::to_vec(&request).expect("request serializes");

        let _permit = self.in_flight.acquire();
        let body = self.with_retries(|| {
            let resp = self
                .agent
                .post(&self.url(EMBED_PATH))
                .content_type("application/json")
                .send(&payload[..])
                .map_err(|e| self.classify(e))?;
            self.read_body(resp)
        })?;

        let parsed: LenientEmbedResponse = serde_json::from_str(&body)
            .map_err(|e| self.violation(format!("bad embed body: {e}")))?;
        if parsed.embeddings.len() != batch.len() {
            return Err(self.violation(format!(
                "sent {} images, got {} embeddings",
                batch.len(),
                parsed.embeddings.len()
            )));
        }
        parsed
            .embeddings
            .into_iter()
            .enumerate()
            .map(|(index, values)| {
                if values.len() != parsed.dim {
                    return Err(self.violation(format!(
                        "embedding {index} has {} values, response dim is {}",
                        values.len(),
                        parsed.dim
                    )));
                }
                let values: Option<Vec<f64>> = values.into_iter().collect();
                let values = values.ok_or_else(|| EncoderError::BadEmbedding {
                    index,
                    reason: "non-numeric entry".into(),
                })?;
                EmbeddingVector::new(values).map_err(|e| EncoderError::BadEmbedding {
                    index,
                    reason: e.to_string(),
                })
            })
            .collect()
    }
}
