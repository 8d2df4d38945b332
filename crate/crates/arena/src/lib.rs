//! Process-level half of the arena: agent subprocesses and their wire
//! protocol, sandboxing, code generators, run configuration, parallel
//! tournament execution and report files. Game logic, validation, rating
//! and scheduling live in `arena_core`.

pub mod cli;
pub mod clock;
pub mod coder;
pub mod config;
pub mod host;
pub mod instances;
pub mod launch;
pub mod parallel;
pub mod pipeline;
pub mod protocol;
pub mod report;
pub mod sandbox;
