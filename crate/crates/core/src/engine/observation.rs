use serde::Serialize;

use crate::games::{connect4, hanoi, holdem, maze, reversi, snake, sudoku, tictactoe, twenty48};

/// What one seat sees of the state. Serialized flat: `seat`, `to_act` and the
/// game's payload fields share one JSON object.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub seat: usize,
    /// `None` once the episode is over.
    pub to_act: Option<usize>,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    TicTacToe(tictactoe::View),
    ConnectFour(connect4::View),
    Reversi(reversi::View),
    Snake(snake::View),
    Sudoku(sudoku::View),
    Twenty48(twenty48::View),
    Hanoi(hanoi::View),
    Maze(maze::View),
    Holdem(holdem::View),
}
