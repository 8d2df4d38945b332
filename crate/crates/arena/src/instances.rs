//! Challenge-set instances and their JSON files.
//!
//! An instance is a game config plus a seed; the seed determines the puzzle
//! (Sudoku grid, maze walls, 2048 spawns). Files also carry the initial
//! observation so sets can be reviewed and versioned, and loading checks it
//! against a fresh generation.

use std::path::Path;

use anyhow::{bail, Context};
use arena_core::seed::{derive, tag_of};
use arena_core::tournament::Instance;
use arena_core::{GameConfig, GameId, GameState};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub game_id: GameId,
    pub seed: u64,
    pub payload: Value,
}

fn initial_view(config: &GameConfig, seed: u64) -> anyhow::Result<Value> {
    let desc = config.descriptor()?;
    let state = GameState::new(&desc, seed)?;
    Ok(serde_json::to_value(state.observe(0)?)?)
}

impl InstanceFile {
    pub fn new(config: GameConfig, seed: u64) -> anyhow::Result<Self> {
        Ok(InstanceFile {
            game_id: config.game_id(),
            seed,
            payload: json!({ "config": config, "initial": initial_view(&config, seed)? }),
        })
    }

    /// Checks the payload against the generator and returns the instance.
    pub fn to_instance(&self) -> anyhow::Result<Instance> {
        let config: GameConfig =
            serde_json::from_value(self.payload.get("config").cloned().unwrap_or(Value::Null))
                .context("payload.config")?;
        if config.game_id() != self.game_id {
            bail!(
                "payload.config is for {} but game_id is {}",
                config.game_id(),
                self.game_id
            );
        }
        if !self.game_id.is_single_player() {
            bail!("{} is not a single-player game", self.game_id);
        }
        if let Some(initial) = self.payload.get("initial") {
            if *initial != initial_view(&config, self.seed)? {
                bail!(
                    "payload.initial does not match the {} generator for seed {}",
                    self.game_id,
                    self.seed
                );
            }
        }
        Ok(Instance {
            config,
            seed: self.seed,
        })
    }

    pub fn load(path: &Path) -> anyhow::Result<Instance> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: InstanceFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        file.to_instance()
            .with_context(|| format!("instance {}", path.display()))
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }
}

/// Difficulty tiers for a single-player game. 2048 has one tier.
pub fn tiers(base: &GameConfig) -> Vec<GameConfig> {
    match *base {
        GameConfig::Sudoku { .. } => [36, 30, 26]
            .map(|clues| GameConfig::Sudoku { clues })
            .to_vec(),
        GameConfig::Maze { visibility, .. } => [11, 21, 31]
            .map(|n| GameConfig::Maze {
                width: n,
                height: n,
                visibility,
            })
            .to_vec(),
        GameConfig::Hanoi { .. } => [4, 6, 8].map(|disks| GameConfig::Hanoi { disks }).to_vec(),
        other => vec![other],
    }
}

/// `per_tier` seeded instances for every tier, in tier order.
pub fn challenge_set(configs: &[GameConfig], per_tier: usize, seed: u64) -> Vec<Instance> {
    let mut out = Vec::with_capacity(configs.len() * per_tier);
    for (t, config) in configs.iter().enumerate() {
        let tier_seed = derive(seed, tag_of(config.game_id().as_str()) ^ t as u64);
        for k in 0..per_tier {
            out.push(Instance {
                config: *config,
                seed: derive(tier_seed, k as u64),
            });
        }
    }
    out
}
