//! Core of the agent arena: game environments behind a single masked-policy
//! interface, baseline agents, the four-layer validator with its bounded
//! repair loop, Gaussian skill rating, and tournament scheduling/metrics.
//!
//! Everything here is pure computation over `alloc`; process management,
//! file formats and the command line live in the `arena` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod agents;
pub mod cards;
pub mod clock;
pub mod engine;
pub mod games;
pub mod rating;
pub mod seed;
pub mod tournament;
pub mod validator;

pub use engine::{
    ActionMask, FailureKind, GameConfig, GameDescriptor, GameId, GameState, InfoKind, MatchRecord,
    Observation, Outcome, ResourceLimits,
};
