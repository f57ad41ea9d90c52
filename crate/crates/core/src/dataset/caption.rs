//! Caption service clients: a deterministic mock and an HTTP client with retries and
//! rate limiting.
//!
//! HTTP protocol: `POST <endpoint>` with JSON `{"image_png_base64": ..., "model_json": ...}`
//! and optional `Authorization: Bearer <key>`. A 200 response carries either
//! `{"caption": "..."}` or `{"filtered": true, "reason": "..."}`.

use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::geometry::model_bounds;
use crate::sequence::{parse_model_lenient, CurveKind};

pub const ENDPOINT_VAR: &str = "CADSEQ_CAPTION_ENDPOINT";
pub const API_KEY_VAR: &str = "CADSEQ_CAPTION_API_KEY";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaptionVerdict {
    Caption(String),
    /// The service judged the model unsuitable.
    Filtered(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CaptionError {
    #[error("caption service unavailable: {0}")]
    ServiceUnavailable(String),
    #[error("caption service kept rate limiting after {0} attempts")]
    RateLimited(u32),
    #[error("bad caption response: {0}")]
    InvalidResponse(String),
}

pub trait CaptionClient: Send + Sync {
    fn describe(&self, image_png: &[u8], model_json: &str) -> Result<CaptionVerdict, CaptionError>;
}

/// Offline captioner: fills a fixed sentence from model statistics.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockCaptioner;

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("1 {word}")
    } else {
        format!("{n} {word}s")
    }
}

impl CaptionClient for MockCaptioner {
    fn describe(
        &self,
        _image_png: &[u8],
        model_json: &str,
    ) -> Result<CaptionVerdict, CaptionError> {
        let m = parse_model_lenient(model_json)
            .map_err(|e| CaptionError::InvalidResponse(e.to_string()))?;
        let mut kinds = Vec::new();
        for kind in [CurveKind::Line, CurveKind::Arc, CurveKind::Circle] {
            let n = m
                .steps
                .iter()
                .flat_map(|s| &s.profile.loops)
                .flat_map(|l| &l.curves)
                .filter(|c| c.kind() == kind)
                .count();
            if n > 0 {
                kinds.push(plural(n, kind.as_str()));
            }
        }
        let shape = match model_bounds(&m) {
            Ok((lo, hi)) => {
                let mut ext: Vec<f64> = (0..3).map(|i| hi[i] - lo[i]).collect();
                ext.sort_by(f64::total_cmp);
                if ext[0] <= 0.0 {
                    "flat".to_string()
                } else {
                    format!("{:.1}:{:.1}:1", ext[2] / ext[0], ext[1] / ext[0])
                }
            }
            Err(_) => "unknown".to_string(),
        };
        Ok(CaptionVerdict::Caption(format!(
            "A part built from {} with sketches of {}; bounding box proportions {}.",
            plural(m.steps.len(), "extrusion"),
            if kinds.is_empty() {
                "no curves".into()
            } else {
                kinds.join(", ")
            },
            shape
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Sends one POST request. Connection-level failures are `Err`; any HTTP status is `Ok`.
pub trait Transport: Send + Sync {
    fn post_json(
        &self,
        url: &str,
        api_key: Option<&str>,
        body: &str,
    ) -> Result<HttpResponse, String>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self { agent }
    }
}

impl Transport for UreqTransport {
    fn post_json(
        &self,
        url: &str,
        api_key: Option<&str>,
        body: &str,
    ) -> Result<HttpResponse, String> {
        let mut req = self
            .agent
            .post(url)
            .header("Content-Type", "application/json");
        if let Some(key) = api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = req.send(body).map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| e.to_string())?;
        Ok(HttpResponse { status, body })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(8),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (1-based): `base·2^(attempt-1)`, capped.
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = 1u32 << (attempt.saturating_sub(1)).min(16);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

/// Enforces a minimum spacing between requests across threads.
pub struct RateLimiter {
    min_interval: Duration,
    last: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(min_interval: Duration) -> Self {
        Self {
            min_interval,
            last: Mutex::new(None),
        }
    }

    /// Time to wait before the next request may go out; reserves that slot.
    fn reserve(&self, now: Instant) -> Duration {
        let mut last = self.last.lock().unwrap_or_else(|p| p.into_inner());
        let slot = match *last {
            Some(t) if t + self.min_interval > now => t + self.min_interval,
            _ => now,
        };
        *last = Some(slot);
        slot - now
    }
}

type Sleeper = Arc<dyn Fn(Duration) + Send + Sync>;

pub struct HttpCaptionClient {
    endpoint: String,
    api_key: Option<String>,
    transport: Box<dyn Transport>,
    retry: RetryPolicy,
    limiter: RateLimiter,
    sleep: Sleeper,
}

#[derive(Serialize)]
struct Request<'a> {
    image_png_base64: String,
    model_json: &'a str,
}

#[derive(Deserialize)]
struct Response {
    caption: Option<String>,
    #[serde(default)]
    filtered: bool,
    reason: Option<String>,
}

impl HttpCaptionClient {
    pub fn new(
        endpoint: impl Into<String>,
        api_key: Option<String>,
        transport: Box<dyn Transport>,
    ) -> Self {
        Self {
            endpoint: endpoint.into(),
            api_key,
            transport,
            retry: RetryPolicy::default(),
            limiter: RateLimiter::new(Duration::from_millis(200)),
            sleep: Arc::new(std::thread::sleep),
        }
    }

    /// Reads the endpoint and key from the environment; `None` if no endpoint is set.
    pub fn from_env() -> Option<Self> {
        let endpoint = std::env::var(ENDPOINT_VAR).ok().filter(|s| !s.is_empty())?;
        let key = std::env::var(API_KEY_VAR).ok().filter(|s| !s.is_empty());
        Some(Self::new(
            endpoint,
            key,
            Box::new(UreqTransport::new(Duration::from_secs(60))),
        ))
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_min_interval(mut self, interval: Duration) -> Self {
        self.limiter = RateLimiter::new(interval);
        self
    }

    pub fn with_sleeper(mut self, sleep: impl Fn(Duration) + Send + Sync + 'static) -> Self {
        self.sleep = Arc::new(sleep);
        self
    }

    fn parse(body: &str) -> Result<CaptionVerdict, CaptionError> {
        let r: Response =
            serde_json::from_str(body).map_err(|e| CaptionError::InvalidResponse(e.to_string()))?;
        match (r.filtered, r.caption) {
            (true, _) => Ok(CaptionVerdict::Filtered(r.reason.unwrap_or_default())),
            (false, Some(c)) if !c.trim().is_empty() => Ok(CaptionVerdict::Caption(c)),
            _ => Err(CaptionError::InvalidResponse(
                "no caption in response".into(),
            )),
        }
    }
}

impl CaptionClient for HttpCaptionClient {
    fn describe(&self, image_png: &[u8], model_json: &str) -> Result<CaptionVerdict, CaptionError> {
        let body = serde_json::to_string(&Request {
            image_png_base64: base64::engine::general_purpose::STANDARD.encode(image_png),
            model_json,
        })
        .expect("request serializes");
        let mut last = CaptionError::ServiceUnavailable("no attempt made".into());
        for attempt in 1..=self.retry.max_attempts.max(1) {
            if attempt > 1 {
                (self.sleep)(self.retry.delay(attempt - 1));
            }
            let wait = self.limiter.reserve(Instant::now());
            if !wait.is_zero() {
                (self.sleep)(wait);
            }
            match self
                .transport
                .post_json(&self.endpoint, self.api_key.as_deref(), &body)
            {
                Ok(r) if r.status == 200 => return Self::parse(&r.body),
                Ok(r) if r.status == 429 => {
                    log::debug!("caption service rate limited (attempt {attempt})");
                    last = CaptionError::RateLimited(attempt);
                }
                Ok(r) if r.status >= 500 => {
                    last = CaptionError::ServiceUnavailable(format!("HTTP {}", r.status));
                }
                Ok(r) => {
                    return Err(CaptionError::InvalidResponse(format!("HTTP {}", r.status)));
                }
                Err(e) => last = CaptionError::ServiceUnavailable(e),
            }
        }
        Err(last)
    }
}
