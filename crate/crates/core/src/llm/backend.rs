use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use super::{LlmError, LlmRequest, LlmResponse, Task};

/// Something that completes prompts.
pub trait LlmBackend: Send + Sync {
    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError>;
}

impl<B: LlmBackend + ?Sized> LlmBackend for Arc<B> {
    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

/// HTTP JSON client: POSTs an [`LlmRequest`] and expects an [`LlmResponse`].
pub struct HttpBackend {
    endpoint: String,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| LlmError::Unavailable(e.to_string()))?;
        Ok(HttpBackend { endpoint: endpoint.into(), client })
    }
}

impl LlmBackend for HttpBackend {
    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        let response = self.client.post(&self.endpoint).json(request).send().map_err(|e| {
            if e.is_timeout() {
                LlmError::Timeout
            } else {
                LlmError::Unavailable(e.to_string())
            }
        })?;
        let status = response.status();
        let body = response.text().map_err(|e| LlmError::Unavailable(e.to_string()))?;
        if !status.is_success() {
            return Err(LlmError::Unavailable(format!("HTTP {status}: {body}")));
        }
        serde_json::from_str::<LlmResponse>(&body)
            .map(|r| r.completion)
            .map_err(|e| LlmError::MalformedResponse { raw: body, reason: e.to_string() })
    }
}

type Rule = Box<dyn Fn(&LlmRequest) -> Option<String> + Send + Sync>;

/// Deterministic in-process backend.
///
/// Lookup order: exact rendered prompt, then the next queued answer for the
/// task, then the rule closure. With no match the call is `Unavailable`.
#[derive(Default)]
pub struct MockBackend {
    exact: HashMap<String, String>,
    queued: Mutex<HashMap<Task, VecDeque<String>>>,
    rule: Option<Rule>,
    calls: Mutex<Vec<LlmRequest>>,
}

impl MockBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_exact(mut self, prompt: impl Into<String>, completion: impl Into<String>) -> Self {
        self.exact.insert(prompt.into(), completion.into());
        self
    }

    pub fn with_sequence(self, task: Task, completions: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.queued
            .lock()
            .expect("poisoned")
            .entry(task)
            .or_default()
            .extend(completions.into_iter().map(Into::into));
        self
    }

    pub fn with_rule(mut self, rule: impl Fn(&LlmRequest) -> Option<String> + Send + Sync + 'static) -> Self {
        self.rule = Some(Box::new(rule));
        self
    }

    /// Every request received so far.
    pub fn calls(&self) -> Vec<LlmRequest> {
        self.calls.lock().expect("poisoned").clone()
    }

    pub fn call_count(&self, task: Task) -> usize {
        self.calls.lock().expect("poisoned").iter().filter(|r| r.task == task).count()
    }
}

impl LlmBackend for MockBackend {
    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        self.calls.lock().expect("poisoned").push(request.clone());
        if let Some(c) = self.exact.get(&request.prompt) {
            return Ok(c.clone());
        }
        if let Some(c) = self.queued.lock().expect("poisoned").get_mut(&request.task).and_then(VecDeque::pop_front) {
            return Ok(c);
        }
        if let Some(c) = self.rule.as_ref().and_then(|r| r(request)) {
            return Ok(c);
        }
        Err(LlmError::Unavailable("mock has no answer for this request".into()))
    }
}

/// Replays completions stored as `<key>.json` ([`LlmResponse`]) files,
/// optionally recording misses from a live backend.
pub struct ReplayBackend {
    dir: PathBuf,
    live: Option<Arc<dyn LlmBackend>>,
}

impl ReplayBackend {
    pub fn replay(dir: impl Into<PathBuf>) -> Self {
        ReplayBackend { dir: dir.into(), live: None }
    }

    pub fn recording(dir: impl Into<PathBuf>, live: Arc<dyn LlmBackend>) -> Self {
        ReplayBackend { dir: dir.into(), live: Some(live) }
    }
}

impl LlmBackend for ReplayBackend {
    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        let path = self.dir.join(format!("{}.json", request.key()));
        match std::fs::read_to_string(&path) {
            Ok(text) => {
                return serde_json::from_str::<LlmResponse>(&text)
                    .map(|r| r.completion)
                    .map_err(|e| LlmError::MalformedResponse { raw: text, reason: e.to_string() })
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(LlmError::Unavailable(e.to_string())),
        }
        let Some(live) = &self.live else {
            return Err(LlmError::Unavailable(format!("no recorded completion {}", path.display())));
        };
        let completion = live.complete(request)?;
        let record = serde_json::to_string_pretty(&LlmResponse { completion: completion.clone() }).expect("serializes");
        std::fs::create_dir_all(&self.dir)
            .and_then(|_| std::fs::write(&path, record))
            .map_err(|e| LlmError::Unavailable(e.to_string()))?;
        Ok(completion)
    }
}
