//! The masked policy interface and the in-process baseline agents.
//!
//! Every decision source, in-process or remote, implements [`Agent`]. Remote
//! agents (child processes speaking the line protocol) live in the `arena`
//! crate; everything here is deterministic and unmetered.

use alloc::boxed::Box;
use alloc::string::String;

use crate::engine::{ActionMask, ConfigError, FailureKind, GameConfig, GameId, Observation};

mod greedy;
pub(crate) mod random;
mod reference;

pub use greedy::GreedyAgent;
pub use random::RandomAgent;
pub use reference::ReferenceAgent;

/// Per-match information sent when a match starts.
#[derive(Clone, Copy, Debug)]
pub struct MatchContext<'a> {
    pub match_id: &'a str,
    pub config: &'a GameConfig,
    pub seat: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct DecisionRequest<'a> {
    pub match_id: &'a str,
    pub step: u64,
    pub observation: &'a Observation,
    pub mask: &'a ActionMask,
    pub deadline_seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Action(usize),
    /// The agent declined to act (sentinel `-1` on the wire).
    NoAction,
    Failed(FailureKind),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionOutcome {
    pub decision: Decision,
    pub latency_seconds: f64,
}

impl DecisionOutcome {
    pub const fn unmetered(decision: Decision) -> Self {
        DecisionOutcome {
            decision,
            latency_seconds: 0.0,
        }
    }

    pub fn action(&self) -> Option<usize> {
        match self.decision {
            Decision::Action(a) => Some(a),
            _ => None,
        }
    }
}

/// The policy π: observation and action mask in, action out.
///
/// A handle answers one request at a time; callers hold `&mut`.
pub trait Agent {
    fn id(&self) -> &str;

    /// Whether decisions are timed against a real clock.
    fn is_metered(&self) -> bool {
        false
    }

    fn begin_match(&mut self, ctx: &MatchContext<'_>) -> Result<(), FailureKind>;

    fn decide(&mut self, request: &DecisionRequest<'_>) -> DecisionOutcome;

    fn end_match(&mut self, _scores: &[f64]) {}

    /// Recent diagnostic output (captured stderr for child processes).
    fn diagnostics(&self) -> String {
        String::new()
    }
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn is_metered(&self) -> bool {
        (**self).is_metered()
    }
    fn begin_match(&mut self, ctx: &MatchContext<'_>) -> Result<(), FailureKind> {
        (**self).begin_match(ctx)
    }
    fn decide(&mut self, request: &DecisionRequest<'_>) -> DecisionOutcome {
        (**self).decide(request)
    }
    fn end_match(&mut self, scores: &[f64]) {
        (**self).end_match(scores)
    }
    fn diagnostics(&self) -> String {
        (**self).diagnostics()
    }
}

/// An agent that could not be started. Every interaction reports the
/// failure it was created with.
#[derive(Debug, Clone)]
pub struct FailedAgent {
    id: String,
    kind: FailureKind,
    detail: String,
}

impl FailedAgent {
    pub fn new(id: impl Into<String>, kind: FailureKind, detail: impl Into<String>) -> Self {
        FailedAgent {
            id: id.into(),
            kind,
            detail: detail.into(),
        }
    }
}

impl Agent for FailedAgent {
    fn id(&self) -> &str {
        &self.id
    }

    fn begin_match(&mut self, _ctx: &MatchContext<'_>) -> Result<(), FailureKind> {
        Err(self.kind)
    }

    fn decide(&mut self, _request: &DecisionRequest<'_>) -> DecisionOutcome {
        DecisionOutcome::unmetered(Decision::Failed(self.kind))
    }

    fn diagnostics(&self) -> String {
        self.detail.clone()
    }
}

/// Names of the in-process agents accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["random", "greedy", "reference"];

/// Builds an in-process agent by name. `minimax` is accepted as an alias of
/// `reference`.
pub fn builtin(
    name: &str,
    id: impl Into<String>,
    game: GameId,
    seed: u64,
) -> Result<Box<dyn Agent + Send>, ConfigError> {
    let id = id.into();
    Ok(match name {
        "random" => Box::new(RandomAgent::new(id, seed)),
        "greedy" => Box::new(GreedyAgent::new(id, seed)),
        "reference" | "minimax" => Box::new(ReferenceAgent::new(id, game)),
        other => return Err(ConfigError::UnknownAgent(other.into())),
    })
}
