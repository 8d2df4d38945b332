//! Rules engines for the nine environments, plus instance generators and
//! exact solvers used as oracles and baselines.

pub mod connect4;
pub mod hanoi;
pub mod holdem;
pub mod maze;
pub mod reversi;
pub mod snake;
pub mod sudoku;
pub mod tictactoe;
pub mod twenty48;

use crate::engine::{ConfigError, GameConfig, GameDescriptor, Visibility};

pub fn make_tictactoe() -> GameDescriptor {
    GameDescriptor::new(GameConfig::TicTacToe).expect("fixed config")
}

pub fn make_connect4() -> GameDescriptor {
    GameDescriptor::new(GameConfig::ConnectFour).expect("fixed config")
}

pub fn make_reversi() -> GameDescriptor {
    GameDescriptor::new(GameConfig::Reversi).expect("fixed config")
}

pub fn make_snake(size: u32) -> Result<GameDescriptor, ConfigError> {
    GameDescriptor::new(GameConfig::Snake { size })
}

pub fn make_sudoku(clues: u32) -> Result<GameDescriptor, ConfigError> {
    GameDescriptor::new(GameConfig::Sudoku { clues })
}

/// The spawn sequence comes from the match seed passed to `reset`.
pub fn make_2048() -> GameDescriptor {
    GameDescriptor::new(GameConfig::Twenty48).expect("fixed config")
}

pub fn make_hanoi(disks: u32) -> Result<GameDescriptor, ConfigError> {
    GameDescriptor::new(GameConfig::Hanoi { disks })
}

pub fn make_maze(
    width: u32,
    height: u32,
    visibility: Visibility,
) -> Result<GameDescriptor, ConfigError> {
    GameDescriptor::new(GameConfig::Maze {
        width,
        height,
        visibility,
    })
}

pub fn make_holdem(
    seats: u32,
    starting_stack: u64,
    small_bet: u64,
) -> Result<GameDescriptor, ConfigError> {
    GameDescriptor::new(GameConfig::Holdem {
        seats,
        starting_stack,
        small_bet,
        hands: holdem::DEFAULT_HANDS,
    })
}

/// Scores for a finished two-seat game from the winner, if any.
pub(crate) fn duel_scores(winner: Option<usize>) -> alloc::vec::Vec<f64> {
    match winner {
        Some(0) => alloc::vec![1.0, -1.0],
        Some(_) => alloc::vec![-1.0, 1.0],
        None => alloc::vec![0.0, 0.0],
    }
}
