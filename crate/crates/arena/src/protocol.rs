//! The newline-delimited JSON protocol between the harness and agent
//! processes.

use arena_core::{GameConfig, Observation};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const PROTOCOL_VERSION: u32 = 1;

/// Action value an agent sends when no action is possible.
pub const NO_ACTION: i64 = -1;

/// Harness to agent. Serializes with `type` as the first key.
#[derive(Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HarnessMessage<'a> {
    Hello {
        protocol: u32,
        game: &'a str,
        seat: usize,
        config: &'a GameConfig,
    },
    Act {
        #[serde(rename = "match")]
        match_id: &'a str,
        step: u64,
        observation: &'a Observation,
        action_mask: &'a [bool],
        deadline_ms: u64,
    },
    Result {
        scores: &'a [f64],
    },
    Bye,
}

impl HarnessMessage<'_> {
    /// One line including the trailing newline.
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("harness messages always serialize");
        s.push('\n');
        s
    }
}

/// Harness messages as an agent sees them; used by Rust-side agents and tests.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IncomingHarness {
    Hello {
        protocol: u32,
        game: String,
        seat: usize,
        config: Value,
    },
    Act {
        #[serde(rename = "match")]
        match_id: String,
        step: u64,
        observation: Value,
        action_mask: Vec<bool>,
        deadline_ms: u64,
    },
    Result {
        scores: Vec<f64>,
    },
    Bye,
}

/// Agent to harness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AgentMessage {
    Ready { name: String },
    Action { step: u64, action: i64 },
}

impl AgentMessage {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("agent messages always serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("line is not valid JSON: {0}")]
    NotJson(String),
    #[error("line is not a JSON object")]
    NotObject,
    #[error("missing or non-string `type`")]
    NoType,
    #[error("unknown message type `{0}`")]
    UnknownType(String),
    #[error("`{0}` missing or of the wrong type")]
    BadField(&'static str),
}

/// Strict parse of one agent line: integer `step` and `action` only (a
/// float such as `1.0` is rejected).
pub fn parse_agent_line(line: &str) -> Result<AgentMessage, Violation> {
    let v: Value = serde_json::from_str(line.trim_end_matches(['\n', '\r']))
        .map_err(|e| Violation::NotJson(e.to_string()))?;
    let obj = v.as_object().ok_or(Violation::NotObject)?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or(Violation::NoType)?;
    match kind {
        "ready" => {
            let name = obj
                .get("name")
                .and_then(Value::as_str)
                .ok_or(Violation::BadField("name"))?;
            Ok(AgentMessage::Ready {
                name: name.to_owned(),
            })
        }
        "action" => {
            let step = obj
                .get("step")
                .and_then(Value::as_u64)
                .ok_or(Violation::BadField("step"))?;
            let action = obj
                .get("action")
                .filter(|a| a.is_i64() || a.is_u64())
                .and_then(Value::as_i64)
                .ok_or(Violation::BadField("action"))?;
            Ok(AgentMessage::Action { step, action })
        }
        other => Err(Violation::UnknownType(other.to_owned())),
    }
}
