//! Program sources for candidates: scripted files and an HTTP chat gateway.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use arena_core::validator::{Coder, CoderError, PromptBundle, RepairRequest};
use serde_json::{json, Value};

/// Environment variable holding the gateway API key.
pub const GATEWAY_KEY_ENV: &str = "ARENA_GATEWAY_KEY";

const SYSTEM_PROMPT: &str =
    "You write complete, runnable game-playing agents. Answer with one fenced code block.";

/// Hands out scripted sources in order: the first for `generate`, the next
/// one for each `repair`, repeating the last when they run out.
#[derive(Clone, Debug)]
pub struct StaticCoder {
    name: String,
    sources: Vec<String>,
    next: usize,
}

impl StaticCoder {
    pub fn new(name: impl Into<String>, sources: Vec<String>) -> Self {
        assert!(
            !sources.is_empty(),
            "a static coder needs at least one source"
        );
        StaticCoder {
            name: name.into(),
            sources,
            next: 0,
        }
    }

    /// Entries of the form `builtin:<agent>` are used verbatim; anything
    /// else is a path whose contents become the source.
    pub fn from_entries(
        name: impl Into<String>,
        entries: &[String],
        base: &Path,
    ) -> std::io::Result<Self> {
        let sources = entries
            .iter()
            .map(|e| {
                if e.starts_with(crate::launch::BUILTIN_PREFIX) {
                    Ok(e.clone())
                } else {
                    std::fs::read_to_string(base.join(e))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(name, sources))
    }

    fn emit(&mut self) -> String {
        let s = self.sources[self.next.min(self.sources.len() - 1)].clone();
        self.next += 1;
        s
    }
}

impl Coder for StaticCoder {
    fn name(&self) -> &str {
        &self.name
    }

    fn generate(&mut self, _prompt: &PromptBundle) -> Result<String, CoderError> {
        self.next = 0;
        Ok(self.emit())
    }

    fn repair(&mut self, _request: &RepairRequest<'_>) -> Result<String, CoderError> {
        Ok(self.emit())
    }
}

/// Content of the first fenced code block, without the info string.
pub fn extract_code_block(text: &str) -> Option<&str> {
    let open = text.find("```")?;
    let after = &text[open + 3..];
    let body_start = after.find('\n')? + 1;
    let body = &after[body_start..];
    let close = body.find("```")?;
    Some(body[..close].trim_end_matches(['\n', '\r']))
}

/// Chat-completion client: POSTs `{model, messages}` and takes the first
/// fenced block of `choices[0].message.content`.
pub struct GatewayCoder {
    name: String,
    endpoint: String,
    model: String,
    key: Option<String>,
    log: Option<PathBuf>,
    agent: ureq::Agent,
}

impl GatewayCoder {
    pub fn new(
        name: impl Into<String>,
        endpoint: impl Into<String>,
        model: impl Into<String>,
        timeout: Duration,
    ) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        GatewayCoder {
            name: name.into(),
            endpoint: endpoint.into(),
            model: model.into(),
            key: std::env::var(GATEWAY_KEY_ENV)
                .ok()
                .filter(|k| !k.is_empty()),
            log: None,
            agent,
        }
    }

    pub fn with_key(mut self, key: Option<String>) -> Self {
        self.key = key;
        self
    }

    /// Request and response bodies are appended here, key redacted.
    pub fn with_log(mut self, path: PathBuf) -> Self {
        self.log = Some(path);
        self
    }

    fn redact(&self, text: &str) -> String {
        match &self.key {
            Some(k) => text.replace(k.as_str(), "[REDACTED]"),
            None => text.to_owned(),
        }
    }

    fn log(&self, label: &str, body: &str) {
        let Some(path) = &self.log else { return };
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        if let Ok(mut f) = OpenOptions::new().create(true).append(true).open(path) {
            let auth = if self.key.is_some() {
                "Bearer [REDACTED]"
            } else {
                "none"
            };
            let _ = writeln!(
                f,
                "--- {label} ({}) authorization: {auth}\n{}",
                self.endpoint,
                self.redact(body)
            );
        }
    }

    pub fn request_body(&self, user: &str) -> Value {
        json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": user},
            ],
        })
    }

    fn complete(&self, user: &str) -> Result<String, CoderError> {
        let body = self.request_body(user).to_string();
        self.log("request", &body);
        let mut req = self
            .agent
            .post(&self.endpoint)
            .header("content-type", "application/json");
        if let Some(k) = &self.key {
            req = req.header("authorization", &format!("Bearer {k}"));
        }
        let mut resp = req
            .send(body.as_bytes())
            .map_err(|e| CoderError::Transport(self.redact(&e.to_string())))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| CoderError::Transport(e.to_string()))?;
        self.log(&format!("response {status}"), &text);
        if status == 429 || status >= 500 {
            return Err(CoderError::Transport(format!("HTTP {status}")));
        }
        if status >= 400 {
            return Err(CoderError::Unusable(format!("HTTP {status}")));
        }
        let v: Value =
            serde_json::from_str(&text).map_err(|e| CoderError::Unusable(e.to_string()))?;
        let content = v
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| CoderError::Unusable("no choices[0].message.content".into()))?;
        extract_code_block(content)
            .map(str::to_owned)
            .ok_or_else(|| CoderError::Unusable("no fenced code block in completion".into()))
    }
}

impl Coder for GatewayCoder {
    fn name(&self) -> &str {
        &self.name
    }

    fn generate(&mut self, prompt: &PromptBundle) -> Result<String, CoderError> {
        self.complete(&prompt.rendered)
    }

    fn repair(&mut self, request: &RepairRequest<'_>) -> Result<String, CoderError> {
        self.complete(&request.render())
    }
}
