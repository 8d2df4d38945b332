//! Hierarchical validation of candidate agents and the bounded
//! generate/test/repair loop.
//!
//! Agents are black boxes here: the structure layer checks the handshake and
//! that replies conform to the interface, the function layer checks mask
//! compliance on scripted states, the logic layer plays whole episodes, and
//! the robustness layer probes edge cases (empty masks, terminal states,
//! bursts of requests). A structure failure skips every later layer.

mod prompt;
mod repair;
mod suite;

pub use prompt::{build_prompt, PromptBundle, PROTOCOL_TEXT};
pub use repair::{
    generate_and_repair, stderr_tail, CandidateAgent, CandidateStatus, Coder, CoderError,
    Iteration, Launcher, RepairPolicy, RepairRequest, SourceChecker, MAX_REPAIRS,
    STDERR_TAIL_BYTES,
};
pub use suite::{
    run_test_suite, suite_for, CaseResult, CaseStatus, Layer, LayerSummary, Procedure, TestCase,
    TestReport,
};
