//! Minimal blocking JSON-over-HTTP client shared by the gateway providers.

use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct JsonClient {
    agent: ureq::Agent,
    base: String,
    retries: u32,
    backoff: Duration,
}

#[derive(Debug)]
pub struct HttpFailure {
    pub message: String,
    pub attempts: u32,
}

impl JsonClient {
    pub fn new(base: &str, timeout: Duration, retries: u32) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        JsonClient {
            agent: ureq::Agent::new_with_config(config),
            base: base.trim_end_matches('/').to_string(),
            retries,
            backoff: Duration::from_millis(100),
        }
    }

    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    /// POSTs `body` to `path`, retrying transport failures and non-200
    /// statuses with exponential backoff.
    pub fn post<B: Serialize, R: DeserializeOwned>(&self, path: &str, body: &B) -> Result<R, HttpFailure> {
        let url = format!("{}{}", self.base, path);
        let mut delay = self.backoff;
        let mut last = String::new();
        for attempt in 0..=self.retries {
            if attempt > 0 {
                thread::sleep(delay);
                delay *= 2;
            }
            match self.agent.post(&url).send_json(body) {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if status != 200 {
                        last = format!("{url} returned HTTP {status}");
                        continue;
                    }
                    return resp.body_mut().read_json::<R>().map_err(|e| HttpFailure {
                        message: format!("invalid response body from {url}: {e}"),
                        attempts: attempt + 1,
                    });
                }
                Err(e) => last = format!("{url}: {e}"),
            }
        }
        Err(HttpFailure { message: last, attempts: self.retries + 1 })
    }
}
