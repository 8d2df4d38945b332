//! Run configuration: one JSON or TOML document, unknown keys rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use arena_core::engine::Visibility;
use arena_core::rating::RatingParams;
use arena_core::tournament::{DrawPolicy, MultiplayerKind};
use arena_core::{GameConfig, GameId, ResourceLimits};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::launch::{LaunchSettings, SOURCE_PLACEHOLDER};

#[derive(Debug, Error)]
#[error("{key}: {message}")]
pub struct ConfigError {
    /// Path of the offending key, e.g. `games[1].size`.
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rounds")]
    pub rounds: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
    pub games: Vec<GameEntry>,
    #[serde(default)]
    pub coders: Vec<CoderEntry>,
    /// Builtin agents entered directly into every tournament.
    #[serde(default)]
    pub baselines: Vec<String>,
    #[serde(default)]
    pub limits: LimitsConfig,
    #[serde(default)]
    pub rating: RatingConfig,
    #[serde(default)]
    pub draw_policy: DrawPolicy,
    #[serde(default)]
    pub agents: AgentRuntime,
}

fn default_rounds() -> u32 {
    5
}

fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityMode {
    Full,
    Radius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplayerSchedule {
    Swiss,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameEntry {
    pub game: GameId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clues: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disks: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visibility: Option<VisibilityMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seats: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starting_stack: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_bet: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hands: Option<u32>,
    /// Two-seat games: matches per ordered pair.
    #[serde(default = "one")]
    pub rounds_per_pair: usize,
    /// Multi-seat Hold'em tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<MultiplayerSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// Single-player games: seeded instances per difficulty tier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances_per_tier: Option<usize>,
    /// Single-player games: instance files used instead of generated tiers.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instance_files: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draw_probability: Option<f64>,
}

fn one() -> usize {
    1
}

impl GameEntry {
    pub fn new(game: GameId) -> Self {
        GameEntry {
            game,
            size: None,
            clues: None,
            disks: None,
            width: None,
            height: None,
            visibility: None,
            radius: None,
            seats: None,
            starting_stack: None,
            small_bet: None,
            hands: None,
            rounds_per_pair: 1,
            schedule: None,
            budget: None,
            instances_per_tier: None,
            instance_files: Vec::new(),
            draw_probability: None,
        }
    }

    /// The game config with defaults filled in.
    pub fn game_config(&self) -> GameConfig {
        match self.game.default_config() {
            GameConfig::Snake { size } => GameConfig::Snake {
                size: self.size.unwrap_or(size),
            },
            GameConfig::Sudoku { clues } => GameConfig::Sudoku {
                clues: self.clues.unwrap_or(clues),
            },
            GameConfig::Hanoi { disks } => GameConfig::Hanoi {
                disks: self.disks.unwrap_or(disks),
            },
            GameConfig::Maze {
                width,
                height,
                visibility,
            } => GameConfig::Maze {
                width: self.width.unwrap_or(width),
                height: self.height.unwrap_or(height),
                visibility: match (self.visibility, self.radius) {
                    (Some(VisibilityMode::Radius), r) => Visibility::Radius(r.unwrap_or(2)),
                    (Some(VisibilityMode::Full), _) => Visibility::Full,
                    (None, _) => visibility,
                },
            },
            GameConfig::Holdem {
                seats,
                starting_stack,
                small_bet,
                hands,
            } => GameConfig::Holdem {
                seats: self.seats.unwrap_or(seats),
                starting_stack: self.starting_stack.unwrap_or(starting_stack),
                small_bet: self.small_bet.unwrap_or(small_bet),
                hands: self.hands.unwrap_or(hands),
            },
            fixed => fixed,
        }
    }

    pub fn multiplayer_kind(&self) -> MultiplayerKind {
        match self.schedule {
            Some(MultiplayerSchedule::Random) => MultiplayerKind::Random,
            _ => MultiplayerKind::Swiss,
        }
    }

    /// Parameters that mean nothing for this game.
    fn stray_keys(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let g = self.game;
        let mut check = |set: bool, key: &'static str, games: &[GameId]| {
            if set && !games.contains(&g) {
                out.push(key);
            }
        };
        check(self.size.is_some(), "size", &[GameId::Snake]);
        check(self.clues.is_some(), "clues", &[GameId::Sudoku]);
        check(self.disks.is_some(), "disks", &[GameId::Hanoi]);
        for (set, key) in [
            (self.width.is_some(), "width"),
            (self.height.is_some(), "height"),
            (self.visibility.is_some(), "visibility"),
            (self.radius.is_some(), "radius"),
        ] {
            check(set, key, &[GameId::Maze]);
        }
        for (set, key) in [
            (self.seats.is_some(), "seats"),
            (self.starting_stack.is_some(), "starting_stack"),
            (self.small_bet.is_some(), "small_bet"),
            (self.hands.is_some(), "hands"),
            (self.schedule.is_some(), "schedule"),
            (self.budget.is_some(), "budget"),
        ] {
            check(set, key, &[GameId::Holdem]);
        }
        let single = [
            GameId::Sudoku,
            GameId::Twenty48,
            GameId::Hanoi,
            GameId::Maze,
        ];
        check(
            self.instances_per_tier.is_some(),
            "instances_per_tier",
            &single,
        );
        check(!self.instance_files.is_empty(), "instance_files", &single);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoderKind {
    Static,
    Gateway,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoderEntry {
    pub name: String,
    pub kind: CoderKind,
    /// Static: files (relative to the config) or `builtin:<agent>` entries,
    /// first for generation, then one per repair.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_seconds: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsConfig {
    pub timeout_seconds: f64,
    pub handshake_timeout_seconds: f64,
    pub memory_bytes: u64,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        let d = ResourceLimits::default();
        LimitsConfig {
            timeout_seconds: d.move_timeout_seconds,
            handshake_timeout_seconds: d.handshake_timeout_seconds,
            memory_bytes: d.memory_bytes,
        }
    }
}

impl LimitsConfig {
    pub fn resource_limits(&self) -> ResourceLimits {
        ResourceLimits {
            move_timeout_seconds: self.timeout_seconds,
            handshake_timeout_seconds: self.handshake_timeout_seconds,
            memory_bytes: self.memory_bytes,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatingConfig {
    pub mu0: f64,
    pub sigma0: f64,
    pub beta: f64,
    pub tau: f64,
    pub draw_probability: f64,
}

impl Default for RatingConfig {
    fn default() -> Self {
        let p = RatingParams::default();
        RatingConfig {
            mu0: p.mu0,
            sigma0: p.sigma0,
            beta: p.beta,
            tau: p.tau,
            draw_probability: p.draw_probability,
        }
    }
}

impl RatingConfig {
    pub fn params(&self) -> RatingParams {
        RatingParams {
            mu0: self.mu0,
            sigma0: self.sigma0,
            beta: self.beta,
            tau: self.tau,
            draw_probability: self.draw_probability,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentRuntime {
    /// Command template for program sources; `{source}` is the script path.
    pub interpreter: Vec<String>,
    pub sandbox: bool,
}

impl Default for AgentRuntime {
    fn default() -> Self {
        let d = LaunchSettings::default();
        AgentRuntime {
            interpreter: d.interpreter,
            sandbox: d.sandbox,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Toml,
}

fn format_of(path: &Path, text: &str) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => Format::Toml,
        Some("json") => Format::Json,
        _ if text.trim_start().starts_with('{') => Format::Json,
        _ => Format::Toml,
    }
}

impl RunConfig {
    /// Parses JSON or TOML (by extension, else by content) and validates.
    pub fn parse(path: &Path, text: &str) -> Result<RunConfig, ConfigError> {
        let cfg: RunConfig = match format_of(path, text) {
            Format::Json => {
                let de = &mut serde_json::Deserializer::from_str(text);
                serde_path_to_error::deserialize(de).map_err(|e| {
                    let key = e.path().to_string();
                    ConfigError::new(key, e.into_inner().to_string())
                })?
            }
            Format::Toml => {
                let de = toml::Deserializer::new(text);
                serde_path_to_error::deserialize(de).map_err(|e| {
                    let key = e.path().to_string();
                    ConfigError::new(key, e.into_inner().message().to_owned())
                })?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(path.display().to_string(), e.to_string()))?;
        Self::parse(path, &text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rounds == 0 {
            return Err(ConfigError::new("rounds", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::new("workers", "must be at least 1"));
        }
        if self.games.is_empty() {
            return Err(ConfigError::new("games", "at least one game is required"));
        }
        if let Some(id) = &self.run_id {
            if id.is_empty() || id.contains(['/', '\\']) || id == "." || id == ".." {
                return Err(ConfigError::new("run_id", "must be a plain directory name"));
            }
        }
        for (i, g) in self.games.iter().enumerate() {
            let key = |k: &str| format!("games[{i}].{k}");
            if let Some(k) = g.stray_keys().first() {
                return Err(ConfigError::new(
                    key(k),
                    format!("not a parameter of {}", g.game),
                ));
            }
            g.game_config()
                .descriptor()
                .map_err(|e| ConfigError::new(format!("games[{i}]"), e.to_string()))?;
            if g.rounds_per_pair == 0 {
                return Err(ConfigError::new(
                    key("rounds_per_pair"),
                    "must be at least 1",
                ));
            }
            if g.instances_per_tier == Some(0) {
                return Err(ConfigError::new(
                    key("instances_per_tier"),
                    "must be at least 1",
                ));
            }
            if let Some(p) = g.draw_probability {
                if !(p > 0.0 && p < 1.0) {
                    return Err(ConfigError::new(
                        key("draw_probability"),
                        "must be within (0, 1)",
                    ));
                }
            }
        }
        let mut ids = BTreeSet::new();
        for (i, c) in self.coders.iter().enumerate() {
            let key = |k: &str| format!("coders[{i}].{k}");
            if c.name.is_empty()
                || !c
                    .name
                    .chars()
                    .all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch))
            {
                return Err(ConfigError::new(
                    key("name"),
                    "use letters, digits, '-', '_' or '.'",
                ));
            }
            if !ids.insert(c.name.clone()) {
                return Err(ConfigError::new(
                    key("name"),
                    format!("duplicate agent id `{}`", c.name),
                ));
            }
            match c.kind {
                CoderKind::Static => {
                    if c.sources.is_empty() {
                        return Err(ConfigError::new(
                            key("sources"),
                            "a static coder needs at least one source",
                        ));
                    }
                    for (k, stray) in [
                        ("endpoint", c.endpoint.is_some()),
                        ("model", c.model.is_some()),
                    ] {
                        if stray {
                            return Err(ConfigError::new(key(k), "only valid for gateway coders"));
                        }
                    }
                }
                CoderKind::Gateway => {
                    if c.endpoint.is_none() {
                        return Err(ConfigError::new(
                            key("endpoint"),
                            "required for gateway coders",
                        ));
                    }
                    if c.model.is_none() {
                        return Err(ConfigError::new(
                            key("model"),
                            "required for gateway coders",
                        ));
                    }
                    if !c.sources.is_empty() {
                        return Err(ConfigError::new(
                            key("sources"),
                            "only valid for static coders",
                        ));
                    }
                }
            }
        }
        for (i, b) in self.baselines.iter().enumerate() {
            if !arena_core::agents::BUILTIN_NAMES.contains(&b.as_str()) && b != "minimax" {
                return Err(ConfigError::new(
                    format!("baselines[{i}]"),
                    format!("unknown builtin agent `{b}`"),
                ));
            }
            if !ids.insert(b.clone()) {
                return Err(ConfigError::new(
                    format!("baselines[{i}]"),
                    format!("duplicate agent id `{b}`"),
                ));
            }
        }
        if !(self.limits.timeout_seconds > 0.0 && self.limits.timeout_seconds.is_finite()) {
            return Err(ConfigError::new(
                "limits.timeout_seconds",
                "must be positive",
            ));
        }
        if self.limits.handshake_timeout_seconds.is_nan()
            || self.limits.handshake_timeout_seconds <= 0.0
        {
            return Err(ConfigError::new(
                "limits.handshake_timeout_seconds",
                "must be positive",
            ));
        }
        self.rating
            .params()
            .validate()
            .map_err(|e| ConfigError::new("rating", e.to_string()))?;
        if self.agents.interpreter.is_empty() {
            return Err(ConfigError::new(
                "agents.interpreter",
                "must name a program",
            ));
        }
        if self.agents.interpreter.len() > 1
            && !self
                .agents
                .interpreter
                .iter()
                .any(|a| a.contains(SOURCE_PLACEHOLDER))
        {
            return Err(ConfigError::new(
                "agents.interpreter",
                format!("must contain {SOURCE_PLACEHOLDER}"),
            ));
        }
        Ok(())
    }

    pub fn run_id(&self) -> String {
        self.run_id
            .clone()
            .unwrap_or_else(|| format!("run-{}", self.seed))
    }

    pub fn launch_settings(&self) -> LaunchSettings {
        LaunchSettings {
            interpreter: self.agents.interpreter.clone(),
            limits: self.limits.resource_limits(),
            sandbox: self.agents.sandbox,
        }
    }
}
