//! Environment abstraction and the match loop shared by all games.
//!
//! A game is a descriptor (fixed interface constants plus parameters) and a
//! [`GameState`] driven through `observe` / `legal_mask` / `apply`. Rewards
//! live on the state as per-seat scores; transitions never return rewards.

mod descriptor;
mod mask;
mod observation;
mod record;
mod runner;
mod state;

pub use descriptor::{ConfigError, GameConfig, GameDescriptor, GameId, InfoKind, Visibility};
pub use mask::ActionMask;
pub use observation::{Observation, Payload};
pub use record::{FailureKind, MatchRecord, Outcome, ResourceLimits, StepRecord};
pub use runner::{run_match, RunError};
pub use state::{apply, legal_mask, observe, reset, EndReason, EngineError, GameState};

#[cfg(test)]
pub(crate) use state::Board;
pub(crate) use state::{Finish, Rules};
