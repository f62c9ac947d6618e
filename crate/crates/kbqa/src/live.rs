//! Optional network-backed snippet source.
//!
//! [`HttpSearchClient`] implements [`SnippetSource`] against a JSON search
//! API: `GET {endpoint}?q={question}&count={max}` with a bearer token, and a
//! response body of `{"snippets": ["...", ...]}`. Requests are throttled to a
//! configurable rate. Nothing in the default pipeline, the tests, or the
//! examples performs network I/O; this adapter exists so a deployment can
//! swap real search results in behind the same trait.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snippet::SnippetSource;

fn default_requests_per_second() -> f64 {
    1.0
}

fn default_result_count() -> usize {
    50
}

/// Connection settings for a live search endpoint. The API key is named by
/// environment variable rather than stored in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchApiConfig {
    pub endpoint: String,
    pub api_key_env: String,
    #[serde(default = "default_requests_per_second")]
    pub requests_per_second: f64,
    #[serde(default = "default_result_count")]
    pub result_count: usize,
}

/// Blocking HTTP client with request throttling.
pub struct HttpSearchClient {
    config: SearchApiConfig,
    api_key: String,
    client: reqwest::blocking::Client,
    last_request: Mutex<Option<Instant>>,
}

#[derive(Deserialize)]
struct SearchResponse {
    snippets: Vec<String>,
}

impl HttpSearchClient {
    pub fn new(config: SearchApiConfig) -> Result<Self> {
        if config.requests_per_second <= 0.0 || config.requests_per_second.is_nan() {
            return Err(Error::Config(format!(
                "requests_per_second must be positive, got {}",
                config.requests_per_second
            )));
        }
        let api_key = std::env::var(&config.api_key_env).map_err(|_| {
            Error::Config(format!(
                "search API key environment variable {} is not set",
                config.api_key_env
            ))
        })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| Error::Config(format!("failed to build HTTP client: {e}")))?;
        Ok(HttpSearchClient {
            config,
            api_key,
            client,
            last_request: Mutex::new(None),
        })
    }

    /// Sleeps as needed so consecutive requests stay at or below the
    /// configured rate. Holding the lock across the sleep intentionally
    /// serializes concurrent callers.
    fn throttle(&self) {
        let min_gap = Duration::from_secs_f64(1.0 / self.config.requests_per_second);
        let mut last = self.last_request.lock().unwrap();
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < min_gap {
                std::thread::sleep(min_gap - elapsed);
            }
        }
        *last = Some(Instant::now());
    }
}

impl SnippetSource for HttpSearchClient {
    fn fetch(&self, question_text: &str, max: usize) -> Result<Vec<String>> {
        self.throttle();
        let count = max.min(self.config.result_count);
        let backend_err = |message: String| Error::Backend {
            question: question_text.to_owned(),
            message,
        };
        let response = self
            .client
            .get(&self.config.endpoint)
            .query(&[("q", question_text), ("count", &count.to_string())])
            .bearer_auth(&self.api_key)
            .send()
            .map_err(|e| backend_err(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(backend_err(format!("search endpoint returned {status}")));
        }
        let body: SearchResponse = response
            .json()
            .map_err(|e| backend_err(format!("bad response body: {e}")))?;
        Ok(body.snippets.into_iter().take(count).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_fills_rate_and_count_defaults() {
        let cfg: SearchApiConfig = toml::from_str(
            r#"
            endpoint = "https://search.example/api"
            api_key_env = "SEARCH_KEY"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.requests_per_second, 1.0);
        assert_eq!(cfg.result_count, 50);

        let cfg: SearchApiConfig = toml::from_str(
            r#"
            endpoint = "https://search.example/api"
            api_key_env = "SEARCH_KEY"
            requests_per_second = 4.0
            result_count = 10
            "#,
        )
        .unwrap();
        assert_eq!(cfg.requests_per_second, 4.0);
        assert_eq!(cfg.result_count, 10);
    }

    #[test]
    fn missing_api_key_env_is_a_config_error() {
        let cfg = SearchApiConfig {
            endpoint: "https://search.example/api".into(),
            api_key_env: "KBQA_TEST_KEY_THAT_IS_NOT_SET".into(),
            requests_per_second: 1.0,
            result_count: 10,
        };
        match HttpSearchClient::new(cfg) {
            Err(Error::Config(msg)) => assert!(msg.contains("KBQA_TEST_KEY_THAT_IS_NOT_SET")),
            Err(other) => panic!("expected config error, got {other:?}"),
            Ok(_) => panic!("expected config error, got a client"),
        }
    }

    #[test]
    fn nonpositive_rate_is_rejected() {
        let cfg = SearchApiConfig {
            endpoint: "https://search.example/api".into(),
            api_key_env: "PATH".into(),
            requests_per_second: 0.0,
            result_count: 10,
        };
        assert!(matches!(HttpSearchClient::new(cfg), Err(Error::Config(_))));
    }
}
