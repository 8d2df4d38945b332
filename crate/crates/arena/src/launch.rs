//! Turning agent specifications and candidate sources into running agents.

use std::path::{Path, PathBuf};
use std::time::Duration;

use arena_core::agents::{builtin, Agent, FailedAgent};
use arena_core::validator::Launcher;
use arena_core::{FailureKind, GameId, ResourceLimits};

use crate::host::{SpawnSpec, SubprocessAgent};
use crate::sandbox::Confinement;

/// Sources or agent specs of the form `builtin:<name>` select an in-process
/// baseline instead of a program.
pub const BUILTIN_PREFIX: &str = "builtin:";

/// Placeholder in the interpreter command replaced by the script path.
pub const SOURCE_PLACEHOLDER: &str = "{source}";

#[derive(Clone, Debug, PartialEq)]
pub struct LaunchSettings {
    /// Command template, e.g. `["python3", "{source}"]`.
    pub interpreter: Vec<String>,
    pub limits: ResourceLimits,
    /// Apply filesystem/network confinement where the OS supports it.
    pub sandbox: bool,
}

impl Default for LaunchSettings {
    fn default() -> Self {
        LaunchSettings {
            interpreter: vec!["python3".into(), SOURCE_PLACEHOLDER.into()],
            limits: ResourceLimits::default(),
            sandbox: true,
        }
    }
}

impl LaunchSettings {
    pub fn command_for(&self, script: &Path) -> Vec<String> {
        let path = script.to_string_lossy();
        let mut cmd: Vec<String> = self
            .interpreter
            .iter()
            .map(|a| a.replace(SOURCE_PLACEHOLDER, &path))
            .collect();
        if !self
            .interpreter
            .iter()
            .any(|a| a.contains(SOURCE_PLACEHOLDER))
        {
            cmd.push(path.into_owned());
        }
        cmd
    }
}

/// Starts `script` with its own scratch directory. Failures come back as an
/// agent that fails its handshake with a crash.
pub fn spawn_script(
    id: &str,
    script: &Path,
    scratch: &Path,
    settings: &LaunchSettings,
) -> Box<dyn Agent + Send> {
    let script = std::path::absolute(script).unwrap_or_else(|_| script.to_path_buf());
    let readable = script.parent().map(Path::to_path_buf).into_iter().collect();
    let spec = SpawnSpec {
        id: id.to_owned(),
        command: settings.command_for(&script),
        confinement: Confinement {
            scratch: scratch.to_path_buf(),
            readable,
            memory_bytes: settings.limits.memory_bytes,
            filesystem: settings.sandbox,
        },
        stderr_log: Some(scratch.join("stderr.log")),
        handshake_timeout: Duration::from_secs_f64(settings.limits.handshake_timeout_seconds),
    };
    match SubprocessAgent::spawn(&spec) {
        Ok(a) => Box::new(a),
        Err(e) => Box::new(FailedAgent::new(
            id,
            FailureKind::Crash,
            format!("spawn failed: {e}"),
        )),
    }
}

/// An agent from a command-line style spec: `builtin:<name>` or a script path.
pub fn agent_from_spec(
    spec: &str,
    id: &str,
    game: GameId,
    seed: u64,
    scratch: &Path,
    settings: &LaunchSettings,
) -> anyhow::Result<Box<dyn Agent + Send>> {
    if let Some(name) = spec.strip_prefix(BUILTIN_PREFIX) {
        return Ok(builtin(name, id, game, seed)?);
    }
    let path = Path::new(spec);
    anyhow::ensure!(path.is_file(), "agent script `{spec}` not found");
    Ok(spawn_script(id, path, scratch, settings))
}

/// Launches candidate sources for one agent id. Each iteration's program is
/// written to its own directory under `dir`.
pub struct ProcessLauncher {
    pub agent_id: String,
    pub dir: PathBuf,
    pub settings: LaunchSettings,
    pub seed: u64,
    pub file_name: String,
}

impl ProcessLauncher {
    pub fn new(
        agent_id: impl Into<String>,
        dir: PathBuf,
        settings: LaunchSettings,
        seed: u64,
    ) -> Self {
        ProcessLauncher {
            agent_id: agent_id.into(),
            dir,
            settings,
            seed,
            file_name: "agent.py".into(),
        }
    }
}

impl Launcher for ProcessLauncher {
    fn launch(&mut self, game: GameId, source: &str, iteration: u32) -> Box<dyn Agent + Send> {
        if let Some(name) = source.trim().strip_prefix(BUILTIN_PREFIX) {
            return builtin(name.trim(), self.agent_id.clone(), game, self.seed).unwrap_or_else(
                |e| {
                    Box::new(FailedAgent::new(
                        &self.agent_id,
                        FailureKind::Crash,
                        e.to_string(),
                    ))
                },
            );
        }
        let scratch = self.dir.join(format!("iter-{iteration}"));
        let script = scratch.join(&self.file_name);
        let written =
            std::fs::create_dir_all(&scratch).and_then(|_| std::fs::write(&script, source));
        if let Err(e) = written {
            return Box::new(FailedAgent::new(
                &self.agent_id,
                FailureKind::Crash,
                format!("cannot write source: {e}"),
            ));
        }
        spawn_script(&self.agent_id, &script, &scratch, &self.settings)
    }
}
