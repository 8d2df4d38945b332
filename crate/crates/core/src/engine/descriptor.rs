use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The nine registered environments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GameId {
    #[serde(rename = "tictactoe")]
    TicTacToe,
    #[serde(rename = "connect4")]
    ConnectFour,
    #[serde(rename = "reversi")]
    Reversi,
    #[serde(rename = "snake")]
    Snake,
    #[serde(rename = "sudoku")]
    Sudoku,
    #[serde(rename = "2048")]
    Twenty48,
    #[serde(rename = "hanoi")]
    Hanoi,
    #[serde(rename = "maze")]
    Maze,
    #[serde(rename = "holdem")]
    Holdem,
}

impl GameId {
    pub const ALL: [GameId; 9] = [
        GameId::TicTacToe,
        GameId::ConnectFour,
        GameId::Reversi,
        GameId::Snake,
        GameId::Sudoku,
        GameId::Twenty48,
        GameId::Hanoi,
        GameId::Maze,
        GameId::Holdem,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            GameId::TicTacToe => "tictactoe",
            GameId::ConnectFour => "connect4",
            GameId::Reversi => "reversi",
            GameId::Snake => "snake",
            GameId::Sudoku => "sudoku",
            GameId::Twenty48 => "2048",
            GameId::Hanoi => "hanoi",
            GameId::Maze => "maze",
            GameId::Holdem => "holdem",
        }
    }

    pub fn parse(s: &str) -> Result<GameId, ConfigError> {
        GameId::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownGame(s.into()))
    }

    pub const fn is_single_player(self) -> bool {
        matches!(
            self,
            GameId::Sudoku | GameId::Twenty48 | GameId::Hanoi | GameId::Maze
        )
    }

    /// The default configuration used when a game is named without options.
    pub const fn default_config(self) -> GameConfig {
        match self {
            GameId::TicTacToe => GameConfig::TicTacToe,
            GameId::ConnectFour => GameConfig::ConnectFour,
            GameId::Reversi => GameConfig::Reversi,
            GameId::Snake => GameConfig::Snake { size: 10 },
            GameId::Sudoku => GameConfig::Sudoku { clues: 30 },
            GameId::Twenty48 => GameConfig::Twenty48,
            GameId::Hanoi => GameConfig::Hanoi { disks: 3 },
            GameId::Maze => GameConfig::Maze {
                width: 11,
                height: 11,
                visibility: Visibility::Full,
            },
            GameId::Holdem => GameConfig::Holdem {
                seats: 2,
                starting_stack: 200,
                small_bet: 2,
                hands: 50,
            },
        }
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoKind {
    Perfect,
    Imperfect,
    PerfectRandom,
}

/// What part of a maze the agent can see.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Full,
    /// Cells within this Chebyshev distance of the agent.
    Radius(u32),
}

/// Game-specific parameters. Together with a seed this fully determines the
/// initial state, so it is stored in every transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "game")]
pub enum GameConfig {
    #[serde(rename = "tictactoe")]
    TicTacToe,
    #[serde(rename = "connect4")]
    ConnectFour,
    #[serde(rename = "reversi")]
    Reversi,
    #[serde(rename = "snake")]
    Snake { size: u32 },
    #[serde(rename = "sudoku")]
    Sudoku { clues: u32 },
    #[serde(rename = "2048")]
    Twenty48,
    #[serde(rename = "hanoi")]
    Hanoi { disks: u32 },
    #[serde(rename = "maze")]
    Maze {
        width: u32,
        height: u32,
        visibility: Visibility,
    },
    #[serde(rename = "holdem")]
    Holdem {
        seats: u32,
        starting_stack: u64,
        small_bet: u64,
        hands: u32,
    },
}

impl GameConfig {
    pub const fn game_id(&self) -> GameId {
        match self {
            GameConfig::TicTacToe => GameId::TicTacToe,
            GameConfig::ConnectFour => GameId::ConnectFour,
            GameConfig::Reversi => GameId::Reversi,
            GameConfig::Snake { .. } => GameId::Snake,
            GameConfig::Sudoku { .. } => GameId::Sudoku,
            GameConfig::Twenty48 => GameId::Twenty48,
            GameConfig::Hanoi { .. } => GameId::Hanoi,
            GameConfig::Maze { .. } => GameId::Maze,
            GameConfig::Holdem { .. } => GameId::Holdem,
        }
    }

    /// Checks parameter ranges and builds the descriptor.
    pub fn descriptor(&self) -> Result<GameDescriptor, ConfigError> {
        GameDescriptor::new(*self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown game id `{0}`")]
    UnknownGame(String),
    #[error("unknown builtin agent `{0}`")]
    UnknownAgent(String),
    #[error("invalid {game} configuration: {reason}")]
    Invalid { game: GameId, reason: String },
}

impl ConfigError {
    pub(crate) fn invalid(game: GameId, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            game,
            reason: reason.into(),
        }
    }
}

/// A registered environment with its fixed interface constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameDescriptor {
    pub game_id: GameId,
    pub seats: usize,
    /// Length of every action mask for this game.
    pub action_space: usize,
    pub observation_schema: &'static str,
    pub action_encoding: &'static str,
    pub info_kind: InfoKind,
    pub config: GameConfig,
    /// Decisions after which the episode is cut off.
    pub step_cap: u64,
}

impl GameDescriptor {
    pub fn new(config: GameConfig) -> Result<Self, ConfigError> {
        use crate::games::*;
        let game = config.game_id();
        let (seats, action_space, info_kind, step_cap) = match config {
            GameConfig::TicTacToe => (2, 9, InfoKind::Perfect, 9),
            GameConfig::ConnectFour => (2, 7, InfoKind::Perfect, 42),
            GameConfig::Reversi => (2, reversi::ACTIONS, InfoKind::Perfect, 130),
            GameConfig::Snake { size } => {
                if size < snake::MIN_SIZE {
                    return Err(ConfigError::invalid(game, "board size must be at least 6"));
                }
                if size > snake::MAX_SIZE {
                    return Err(ConfigError::invalid(game, "board size must be at most 64"));
                }
                (
                    2,
                    4,
                    InfoKind::Perfect,
                    4 * u64::from(size) * u64::from(size),
                )
            }
            GameConfig::Sudoku { clues } => {
                if !(sudoku::MIN_CLUES..=sudoku::MAX_CLUES).contains(&clues) {
                    return Err(ConfigError::invalid(
                        game,
                        "clue count must be within 24..=40",
                    ));
                }
                (1, 729, InfoKind::Perfect, 81)
            }
            GameConfig::Twenty48 => (1, 4, InfoKind::PerfectRandom, 10_000),
            GameConfig::Hanoi { disks } => {
                if !(1..=hanoi::MAX_DISKS).contains(&disks) {
                    return Err(ConfigError::invalid(
                        game,
                        "disk count must be within 1..=12",
                    ));
                }
                (1, 6, InfoKind::Perfect, 1u64 << (disks + 2))
            }
            GameConfig::Maze {
                width,
                height,
                visibility,
            } => {
                maze::check_dims(width, height)?;
                let info = match visibility {
                    Visibility::Full => InfoKind::Perfect,
                    Visibility::Radius(_) => InfoKind::Imperfect,
                };
                (1, 4, info, 4 * u64::from(width) * u64::from(height))
            }
            GameConfig::Holdem {
                seats,
                starting_stack,
                small_bet,
                hands,
            } => {
                if !(2..=9).contains(&seats) {
                    return Err(ConfigError::invalid(
                        game,
                        "seat count must be within 2..=9",
                    ));
                }
                if small_bet < 2 || small_bet % 2 != 0 {
                    return Err(ConfigError::invalid(
                        game,
                        "small bet must be even and at least 2",
                    ));
                }
                if starting_stack < small_bet {
                    return Err(ConfigError::invalid(
                        game,
                        "starting stack below the big blind",
                    ));
                }
                if hands == 0 {
                    return Err(ConfigError::invalid(
                        game,
                        "hands per match must be positive",
                    ));
                }
                (
                    seats as usize,
                    4,
                    InfoKind::Imperfect,
                    holdem::DECISIONS_PER_HAND * u64::from(hands),
                )
            }
        };
        Ok(GameDescriptor {
            game_id: game,
            seats,
            action_space,
            observation_schema: schema_of(game),
            action_encoding: encoding_of(game),
            info_kind,
            config,
            step_cap,
        })
    }
}

fn schema_of(game: GameId) -> &'static str {
    use crate::games::*;
    match game {
        GameId::TicTacToe => tictactoe::OBSERVATION_SCHEMA,
        GameId::ConnectFour => connect4::OBSERVATION_SCHEMA,
        GameId::Reversi => reversi::OBSERVATION_SCHEMA,
        GameId::Snake => snake::OBSERVATION_SCHEMA,
        GameId::Sudoku => sudoku::OBSERVATION_SCHEMA,
        GameId::Twenty48 => twenty48::OBSERVATION_SCHEMA,
        GameId::Hanoi => hanoi::OBSERVATION_SCHEMA,
        GameId::Maze => maze::OBSERVATION_SCHEMA,
        GameId::Holdem => holdem::OBSERVATION_SCHEMA,
    }
}

fn encoding_of(game: GameId) -> &'static str {
    use crate::games::*;
    match game {
        GameId::TicTacToe => tictactoe::ACTION_ENCODING,
        GameId::ConnectFour => connect4::ACTION_ENCODING,
        GameId::Reversi => reversi::ACTION_ENCODING,
        GameId::Snake => snake::ACTION_ENCODING,
        GameId::Sudoku => sudoku::ACTION_ENCODING,
        GameId::Twenty48 => twenty48::ACTION_ENCODING,
        GameId::Hanoi => hanoi::ACTION_ENCODING,
        GameId::Maze => maze::ACTION_ENCODING,
        GameId::Holdem => holdem::ACTION_ENCODING,
    }
}
