use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::descriptor::{GameConfig, GameId};
use super::state::{EngineError, GameState};

/// Why a seat lost by forfeit, or why a decision failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Timeout,
    IllegalAction,
    Crash,
    ProtocolError,
    /// Auto-loss after the agent was withdrawn from the game.
    Withdrawn,
}

impl FailureKind {
    pub const fn as_str(self) -> &'static str {
        match self {
            FailureKind::Timeout => "timeout",
            FailureKind::IllegalAction => "illegal_action",
            FailureKind::Crash => "crash",
            FailureKind::ProtocolError => "protocol_error",
            FailureKind::Withdrawn => "withdrawn",
        }
    }
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// For single-player games, seat 0 winning means the puzzle was solved.
    Winner {
        seat: usize,
    },
    Draw,
    /// Single-player episode ended without success.
    Failed,
    Forfeit {
        seat: usize,
        cause: FailureKind,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub seat: usize,
    /// `None` when the agent produced no usable action.
    pub action: Option<usize>,
    pub latency_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<FailureKind>,
}

/// Transcript of one match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub match_id: String,
    pub game_id: GameId,
    pub config: GameConfig,
    /// Agent id per seat.
    pub agents: Vec<String>,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
    pub scores: Vec<f64>,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub withdrawn: bool,
}

impl MatchRecord {
    pub fn seats(&self) -> usize {
        self.agents.len()
    }

    pub fn seat_of(&self, agent: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == agent)
    }

    /// The seat charged with a forfeit, if any.
    pub fn forfeiter(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Forfeit { seat, .. } => Some(seat),
            _ => None,
        }
    }

    pub fn is_win_for(&self, seat: usize) -> bool {
        match self.outcome {
            Outcome::Winner { seat: w } => w == seat,
            Outcome::Forfeit { seat: f, .. } => {
                // Remaining seats win; in multi-seat games only the top finisher.
                f != seat && self.finish_ranks().get(seat) == Some(&1)
            }
            _ => false,
        }
    }

    /// Whether `seat` recorded at least one failed decision or forfeited.
    pub fn had_failure(&self, seat: usize) -> bool {
        self.forfeiter() == Some(seat)
            || self
                .steps
                .iter()
                .any(|s| s.seat == seat && s.error.is_some())
    }

    /// Competition ranks per seat (1 = best, ties share a rank). A forfeiting
    /// seat is placed last; the rest are ordered by score.
    pub fn finish_ranks(&self) -> Vec<usize> {
        let n = self.seats();
        let forfeiter = self.forfeiter();
        let key = |s: usize| -> (bool, f64) { (Some(s) != forfeiter, self.scores[s]) };
        (0..n)
            .map(|s| {
                let (ok, score) = key(s);
                1 + (0..n)
                    .filter(|&o| {
                        let (ook, oscore) = key(o);
                        (ook && !ok) || (ook == ok && oscore > score)
                    })
                    .count()
            })
            .collect()
    }

    pub fn total_latency(&self, seat: usize) -> f64 {
        self.steps
            .iter()
            .filter(|s| s.seat == seat)
            .map(|s| s.latency_seconds)
            .sum()
    }

    /// Replays the recorded actions from the seed. Steps that carry an error
    /// are not replayed.
    pub fn replay(&self) -> Result<GameState, EngineError> {
        let desc = self.config.descriptor()?;
        let mut state = GameState::new(&desc, self.seed)?;
        for step in &self.steps {
            if step.error.is_some() {
                continue;
            }
            if let Some(a) = step.action {
                state.apply(step.seat, a)?;
            }
        }
        Ok(state)
    }
}

/// Limits applied to every agent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceLimits {
    pub move_timeout_seconds: f64,
    pub handshake_timeout_seconds: f64,
    pub memory_bytes: u64,
}

impl ResourceLimits {
    pub const DEFAULT_MOVE_TIMEOUT: f64 = 45.0;
    pub const DEFAULT_HANDSHAKE_TIMEOUT: f64 = 10.0;
    pub const DEFAULT_MEMORY_BYTES: u64 = 1 << 30;

    pub fn with_timeout(seconds: f64) -> Self {
        ResourceLimits {
            move_timeout_seconds: seconds,
            ..Self::default()
        }
    }

    /// Wall-clock cap for a whole match.
    pub fn match_wall_cap(&self, step_cap: u64) -> f64 {
        self.move_timeout_seconds * step_cap as f64
    }
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits {
            move_timeout_seconds: Self::DEFAULT_MOVE_TIMEOUT,
            handshake_timeout_seconds: Self::DEFAULT_HANDSHAKE_TIMEOUT,
            memory_bytes: Self::DEFAULT_MEMORY_BYTES,
        }
    }
}
