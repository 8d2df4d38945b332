use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use core::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::prompt::PromptBundle;
use super::suite::{run_test_suite, CaseResult, CaseStatus, Layer, TestCase, TestReport};
use crate::agents::Agent;
use crate::clock::Clock;
use crate::engine::{GameId, ResourceLimits};

pub const MAX_REPAIRS: u32 = 3;
pub const STDERR_TAIL_BYTES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoderError {
    /// Network or service trouble; worth retrying.
    #[error("transport: {0}")]
    Transport(String),
    /// The coder answered but produced nothing usable.
    #[error("unusable response: {0}")]
    Unusable(String),
}

impl CoderError {
    pub fn is_retriable(&self) -> bool {
        matches!(self, CoderError::Transport(_))
    }
}

/// Everything the coder needs to fix a failing candidate.
#[derive(Clone, Debug)]
pub struct RepairRequest<'a> {
    pub prompt: &'a PromptBundle,
    pub source: &'a str,
    pub report: &'a TestReport,
    pub stderr_tail: &'a str,
}

impl RepairRequest<'_> {
    pub fn failing_cases(&self) -> Vec<&str> {
        self.report.failing_cases().collect()
    }

    /// Original prompt, failing case ids, the error set as a bulleted list,
    /// the captured stderr tail and the previous source.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.prompt.rendered);
        out.push_str("\n\n## Validation failed\n\nFailing test cases:\n");
        for id in self.failing_cases() {
            let _ = writeln!(out, "- {id}");
        }
        out.push_str("\nErrors:\n");
        for e in &self.report.errors {
            let _ = writeln!(out, "- {e}");
        }
        if !self.stderr_tail.is_empty() {
            let _ = write!(
                out,
                "\nCaptured stderr (tail):\n```\n{}\n```\n",
                self.stderr_tail.trim_end()
            );
        }
        let _ = write!(
            out,
            "\nPrevious program:\n```\n{}\n```\n\nFix every error above and reply with the complete corrected \
             program in one fenced code block.",
            self.source.trim_end()
        );
        out
    }
}

/// A source of agent programs.
pub trait Coder {
    fn name(&self) -> &str;

    fn generate(&mut self, prompt: &PromptBundle) -> Result<String, CoderError>;

    fn repair(&mut self, request: &RepairRequest<'_>) -> Result<String, CoderError>;
}

/// Turns program text into a running agent. Launch failures should come
/// back as an agent that fails its handshake, not as a panic.
pub trait Launcher {
    fn launch(&mut self, game: GameId, source: &str, iteration: u32) -> Box<dyn Agent + Send>;
}

/// Language-specific static checks run before launching.
pub trait SourceChecker {
    /// One message per finding; empty means the source is acceptable.
    fn check(&self, source: &str) -> Vec<String>;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepairPolicy {
    pub max_repairs: u32,
    /// Coder calls per generate or repair step, counting the first.
    pub max_attempts: u32,
    pub backoff_initial_seconds: f64,
    pub backoff_max_seconds: f64,
}

impl Default for RepairPolicy {
    fn default() -> Self {
        RepairPolicy {
            max_repairs: MAX_REPAIRS,
            max_attempts: 3,
            backoff_initial_seconds: 1.0,
            backoff_max_seconds: 8.0,
        }
    }
}

impl RepairPolicy {
    fn backoff(&self, attempt: u32) -> Duration {
        let s = self.backoff_initial_seconds * libm::pow(2.0, f64::from(attempt));
        Duration::from_secs_f64(s.min(self.backoff_max_seconds).max(0.0))
    }
}

/// One failed validation and the repair prompt it produced, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iteration {
    pub iteration: u32,
    pub report: TestReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repair_prompt: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CandidateStatus {
    Deployed,
    Rejected { cause: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateAgent {
    pub coder: String,
    pub game: GameId,
    /// Last program text received (empty if generation itself failed).
    pub source: String,
    /// Repairs used, 0..=3.
    pub iteration: u32,
    pub history: Vec<Iteration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<TestReport>,
    pub status: CandidateStatus,
}

impl CandidateAgent {
    pub fn is_deployed(&self) -> bool {
        self.status == CandidateStatus::Deployed
    }

    /// Whether the unrepaired program passed.
    pub fn passed_first(&self) -> bool {
        self.is_deployed() && self.iteration == 0
    }
}

/// Last `max` bytes of `text`, cut at a character boundary.
pub fn stderr_tail(text: &str, max: usize) -> &str {
    if text.len() <= max {
        return text;
    }
    let mut start = text.len() - max;
    while !text.is_char_boundary(start) {
        start += 1;
    }
    &text[start..]
}

fn with_retries(
    policy: &RepairPolicy,
    clock: &dyn Clock,
    mut call: impl FnMut() -> Result<String, CoderError>,
) -> Result<String, CoderError> {
    let mut attempt = 0;
    loop {
        match call() {
            Ok(s) => return Ok(s),
            Err(e) if e.is_retriable() && attempt + 1 < policy.max_attempts.max(1) => {
                clock.sleep(policy.backoff(attempt));
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

fn validate(
    launcher: &mut dyn Launcher,
    checker: Option<&dyn SourceChecker>,
    game: GameId,
    source: &str,
    iteration: u32,
    suite: &[TestCase],
    limits: &ResourceLimits,
    clock: &dyn Clock,
) -> (TestReport, String) {
    let findings = checker.map(|c| c.check(source)).unwrap_or_default();
    let mut agent = launcher.launch(game, source, iteration);
    let mut report = if findings.is_empty() {
        run_test_suite(&mut *agent, suite, limits, clock)
    } else {
        // Source problems fail the structure layer before anything runs.
        let mut r = run_test_suite(&mut *agent, &[], limits, clock);
        r.game = game;
        let id = format!("{game}.structure.source_check");
        r.cases.push(CaseResult {
            id: id.clone(),
            layer: Layer::Structure,
            status: CaseStatus::Fail,
            detail: Some(findings.join("; ")),
        });
        for case in suite {
            r.cases.push(CaseResult {
                id: case.id.clone(),
                layer: case.layer,
                status: CaseStatus::NotRun,
                detail: Some(String::from("not run: structure layer failed")),
            });
        }
        r.errors = r
            .cases
            .iter()
            .map(|c| format!("{}: {}", c.id, c.detail.as_deref().unwrap_or("failed")))
            .collect();
        r.layers = super::suite::summarize(&r.cases);
        r.passed = false;
        r
    };
    report.game = game;
    let tail = stderr_tail(&agent.diagnostics(), STDERR_TAIL_BYTES).to_string();
    (report, tail)
}

/// Generate, validate, and repair up to `policy.max_repairs` times.
#[allow(clippy::too_many_arguments)]
pub fn generate_and_repair(
    coder: &mut dyn Coder,
    launcher: &mut dyn Launcher,
    checker: Option<&dyn SourceChecker>,
    prompt: &PromptBundle,
    suite: &[TestCase],
    limits: &ResourceLimits,
    policy: &RepairPolicy,
    clock: &dyn Clock,
) -> CandidateAgent {
    let game = prompt.game;
    let max_repairs = policy.max_repairs.min(MAX_REPAIRS);
    let mut candidate = CandidateAgent {
        coder: coder.name().to_string(),
        game,
        source: String::new(),
        iteration: 0,
        history: Vec::new(),
        report: None,
        status: CandidateStatus::Rejected {
            cause: String::from("not generated"),
        },
    };
    match with_retries(policy, clock, || coder.generate(prompt)) {
        Ok(s) => candidate.source = s,
        Err(e) => {
            candidate.status = CandidateStatus::Rejected {
                cause: format!("generation failed: {e}"),
            };
            return candidate;
        }
    }
    loop {
        let (report, tail) = validate(
            launcher,
            checker,
            game,
            &candidate.source,
            candidate.iteration,
            suite,
            limits,
            clock,
        );
        if report.passed {
            candidate.report = Some(report);
            candidate.status = CandidateStatus::Deployed;
            return candidate;
        }
        if candidate.iteration >= max_repairs {
            candidate.history.push(Iteration {
                iteration: candidate.iteration,
                report: report.clone(),
                repair_prompt: None,
            });
            candidate.status = CandidateStatus::Rejected {
                cause: format!("still failing after {} repairs", candidate.iteration),
            };
            candidate.report = Some(report);
            return candidate;
        }
        let request = RepairRequest {
            prompt,
            source: &candidate.source,
            report: &report,
            stderr_tail: &tail,
        };
        let rendered = request.render();
        let fixed = with_retries(policy, clock, || coder.repair(&request));
        candidate.history.push(Iteration {
            iteration: candidate.iteration,
            report: report.clone(),
            repair_prompt: Some(rendered),
        });
        match fixed {
            Ok(s) => {
                candidate.source = s;
                candidate.iteration += 1;
            }
            Err(e) => {
                candidate.status = CandidateStatus::Rejected {
                    cause: format!("repair failed: {e}"),
                };
                candidate.report = Some(report);
                return candidate;
            }
        }
    }
}
