//! Agents running as child processes behind the line protocol.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use arena_core::agents::{Agent, Decision, DecisionOutcome, DecisionRequest, MatchContext};
use arena_core::validator::STDERR_TAIL_BYTES;
use arena_core::FailureKind;

use crate::protocol::{
    parse_agent_line, AgentMessage, HarnessMessage, NO_ACTION, PROTOCOL_VERSION,
};
use crate::sandbox::{self, Confinement};

/// Lines longer than this are a protocol error.
pub const MAX_LINE_BYTES: usize = 16 << 20;

/// How a child process is started.
#[derive(Clone, Debug)]
pub struct SpawnSpec {
    pub id: String,
    /// Program followed by its arguments.
    pub command: Vec<String>,
    pub confinement: Confinement,
    /// Captured stderr is appended here.
    pub stderr_log: Option<PathBuf>,
    pub handshake_timeout: Duration,
}

enum Event {
    Line(String),
    Invalid(&'static str),
    Closed,
}

/// A remote agent. One request is in flight at a time; a reply that misses
/// its deadline is discarded when it eventually arrives.
pub struct SubprocessAgent {
    id: String,
    name: Option<String>,
    child: Child,
    stdin: Option<ChildStdin>,
    events: Receiver<Event>,
    /// Replies still owed for requests that timed out.
    stale: usize,
    dead: Option<FailureKind>,
    handshake_timeout: Duration,
    stderr_tail: Arc<Mutex<Vec<u8>>>,
    /// Last protocol violation, reported with the diagnostics.
    violation: Option<String>,
}

impl SubprocessAgent {
    pub fn spawn(spec: &SpawnSpec) -> io::Result<SubprocessAgent> {
        let (program, args) = spec
            .command
            .split_first()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "empty agent command"))?;
        std::fs::create_dir_all(&spec.confinement.scratch)?;
        let mut cmd = Command::new(program);
        cmd.args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        sandbox::apply(&mut cmd, &spec.confinement)?;
        let mut child = cmd.spawn()?;

        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, events) = mpsc::channel();
        thread::Builder::new()
            .name(format!("agent-{}-stdout", spec.id))
            .spawn(move || read_lines(stdout, tx))?;

        let stderr = child.stderr.take().expect("piped stderr");
        let stderr_tail = Arc::new(Mutex::new(Vec::new()));
        let log = match &spec.stderr_log {
            Some(p) => {
                if let Some(dir) = p.parent() {
                    std::fs::create_dir_all(dir)?;
                }
                Some(OpenOptions::new().create(true).append(true).open(p)?)
            }
            None => None,
        };
        let tail = Arc::clone(&stderr_tail);
        thread::Builder::new()
            .name(format!("agent-{}-stderr", spec.id))
            .spawn(move || copy_stderr(stderr, log, tail))?;

        Ok(SubprocessAgent {
            id: spec.id.clone(),
            name: None,
            stdin: child.stdin.take(),
            child,
            events,
            stale: 0,
            dead: None,
            handshake_timeout: spec.handshake_timeout,
            stderr_tail,
            violation: None,
        })
    }

    /// Name announced in the last `ready` message.
    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn pid(&self) -> u32 {
        self.child.id()
    }

    fn send(&mut self, line: &str) -> Result<(), FailureKind> {
        let Some(stdin) = self.stdin.as_mut() else {
            return Err(FailureKind::Crash);
        };
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|_| self.kill(FailureKind::Crash))
    }

    fn violated(&mut self, what: String) -> FailureKind {
        self.violation = Some(what);
        FailureKind::ProtocolError
    }

    fn kill(&mut self, kind: FailureKind) -> FailureKind {
        self.dead = Some(kind);
        kind
    }

    /// Next fresh line before `deadline`, skipping replies owed to earlier
    /// timed-out requests.
    fn next_line(&mut self, deadline: Instant) -> Result<String, FailureKind> {
        loop {
            let wait = deadline.saturating_duration_since(Instant::now());
            match self.events.recv_timeout(wait) {
                Ok(Event::Line(_)) if self.stale > 0 => self.stale -= 1,
                Ok(Event::Line(l)) => return Ok(l),
                Ok(Event::Invalid(why)) => {
                    self.violation = Some(why.to_owned());
                    return Err(FailureKind::ProtocolError);
                }
                Ok(Event::Closed) | Err(RecvTimeoutError::Disconnected) => {
                    return Err(self.kill(FailureKind::Crash));
                }
                Err(RecvTimeoutError::Timeout) => {
                    self.stale += 1;
                    return Err(FailureKind::Timeout);
                }
            }
        }
    }
}

fn read_lines(stdout: impl Read, tx: mpsc::Sender<Event>) {
    let mut reader = BufReader::new(stdout);
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = (&mut reader)
            .take(MAX_LINE_BYTES as u64 + 1)
            .read_until(b'\n', &mut buf)
            .unwrap_or_default();
        if n == 0 {
            let _ = tx.send(Event::Closed);
            return;
        }
        let event = if buf.len() > MAX_LINE_BYTES {
            // Drain the rest of the oversized line.
            let _ = reader.read_until(b'\n', &mut Vec::new());
            Event::Invalid("line too long")
        } else {
            match String::from_utf8(std::mem::take(&mut buf)) {
                Ok(s) => Event::Line(s),
                Err(_) => Event::Invalid("line is not UTF-8"),
            }
        };
        if tx.send(event).is_err() {
            return;
        }
    }
}

fn copy_stderr(mut stderr: impl Read, mut log: Option<File>, tail: Arc<Mutex<Vec<u8>>>) {
    let mut chunk = [0u8; 4096];
    loop {
        let n = match stderr.read(&mut chunk) {
            Ok(0) | Err(_) => return,
            Ok(n) => n,
        };
        if let Some(f) = log.as_mut() {
            let _ = f.write_all(&chunk[..n]);
        }
        let mut t = tail.lock().unwrap_or_else(|e| e.into_inner());
        t.extend_from_slice(&chunk[..n]);
        if t.len() > STDERR_TAIL_BYTES {
            let cut = t.len() - STDERR_TAIL_BYTES;
            t.drain(..cut);
        }
    }
}

impl Agent for SubprocessAgent {
    fn id(&self) -> &str {
        &self.id
    }

    fn is_metered(&self) -> bool {
        true
    }

    fn begin_match(&mut self, ctx: &MatchContext<'_>) -> Result<(), FailureKind> {
        if let Some(kind) = self.dead {
            return Err(kind);
        }
        let hello = HarnessMessage::Hello {
            protocol: PROTOCOL_VERSION,
            game: ctx.config.game_id().as_str(),
            seat: ctx.seat,
            config: ctx.config,
        };
        self.send(&hello.to_line())?;
        let line = self.next_line(Instant::now() + self.handshake_timeout)?;
        match parse_agent_line(&line) {
            Ok(AgentMessage::Ready { name }) => {
                self.name = Some(name);
                Ok(())
            }
            Ok(other) => Err(self.violated(format!(
                "expected ready, got {}",
                other.to_line().trim_end()
            ))),
            Err(v) => Err(self.violated(v.to_string())),
        }
    }

    fn decide(&mut self, request: &DecisionRequest<'_>) -> DecisionOutcome {
        if let Some(kind) = self.dead {
            return DecisionOutcome::unmetered(Decision::Failed(kind));
        }
        let deadline = Duration::from_secs_f64(request.deadline_seconds.max(0.0));
        let act = HarnessMessage::Act {
            match_id: request.match_id,
            step: request.step,
            observation: request.observation,
            action_mask: request.mask.bits(),
            deadline_ms: deadline.as_millis() as u64,
        };
        let line = act.to_line();
        let start = Instant::now();
        let failed = |kind, latency: f64| DecisionOutcome {
            decision: Decision::Failed(kind),
            latency_seconds: latency,
        };
        if let Err(kind) = self.send(&line) {
            return failed(kind, start.elapsed().as_secs_f64());
        }
        let reply = self.next_line(start + deadline);
        let elapsed = start.elapsed();
        let reply = match reply {
            // Arrived, but only after the deadline had passed.
            Ok(_) if elapsed > deadline => Err(FailureKind::Timeout),
            r => r,
        };
        let latency = match reply {
            Err(FailureKind::Timeout) => deadline.as_secs_f64(),
            _ => elapsed.as_secs_f64(),
        };
        let decision = match reply.map(|l| parse_agent_line(&l)) {
            Err(kind) => Decision::Failed(kind),
            Ok(Ok(AgentMessage::Action { step, action })) if step == request.step => match action {
                NO_ACTION => Decision::NoAction,
                a if a < 0 => Decision::Failed(self.violated(format!("negative action {a}"))),
                a => Decision::Action(usize::try_from(a).unwrap_or(usize::MAX)),
            },
            Ok(Ok(AgentMessage::Action { step, .. })) => Decision::Failed(
                self.violated(format!("reply for step {step}, expected {}", request.step)),
            ),
            Ok(Ok(AgentMessage::Ready { .. })) => {
                Decision::Failed(self.violated("ready sent instead of an action".into()))
            }
            Ok(Err(v)) => Decision::Failed(self.violated(v.to_string())),
        };
        DecisionOutcome {
            decision,
            latency_seconds: latency,
        }
    }

    fn end_match(&mut self, scores: &[f64]) {
        if self.dead.is_none() {
            let _ = self.send(&HarnessMessage::Result { scores }.to_line());
        }
    }

    fn diagnostics(&self) -> String {
        let t = self.stderr_tail.lock().unwrap_or_else(|e| e.into_inner());
        let stderr = String::from_utf8_lossy(&t);
        match &self.violation {
            Some(v) => format!("protocol violation: {v}\n{stderr}"),
            None => stderr.into_owned(),
        }
    }
}

impl Drop for SubprocessAgent {
    fn drop(&mut self) {
        if self.dead != Some(FailureKind::Crash) {
            let _ = self.send(&HarnessMessage::Bye.to_line());
        }
        self.stdin = None;
        let until = Instant::now() + Duration::from_millis(200);
        while Instant::now() < until {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(5));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
