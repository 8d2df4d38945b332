//! Connect Four on a 6x7 board. Cells are row-major with row 0 at the top;
//! pieces fall to the lowest empty row of the chosen column.

use alloc::vec::Vec;

use serde::Serialize;

use super::duel_scores;
use crate::engine::{Finish, Payload, Rules};
use crate::seed::ArenaRng;

pub const ROWS: usize = 6;
pub const COLS: usize = 7;

pub const OBSERVATION_SCHEMA: &str = "{\"seat\": int, \"to_act\": int|null, \"cells\": [int; 42]} \
cells are row-major over 6 rows x 7 columns with row 0 at the TOP; 0 = empty, 1 = seat 0, 2 = seat 1.";

pub const ACTION_ENCODING: &str = "action c in 0..7 drops a piece into column c (0 = leftmost); \
the bit is false when the column is full.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub cells: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectFour {
    cells: [u8; ROWS * COLS],
    to_act: usize,
    placed: usize,
    winner: Option<usize>,
}

impl ConnectFour {
    pub fn new() -> Self {
        ConnectFour {
            cells: [0; ROWS * COLS],
            to_act: 0,
            placed: 0,
            winner: None,
        }
    }

    /// Rebuilds a position from an observation's cells.
    pub fn from_cells(cells: &[u8]) -> Self {
        let mut c = [0u8; ROWS * COLS];
        c.copy_from_slice(&cells[..ROWS * COLS]);
        let placed = c.iter().filter(|v| **v != 0).count();
        let ones = c.iter().filter(|v| **v == 1).count();
        ConnectFour {
            cells: c,
            to_act: usize::from(ones > placed - ones),
            placed,
            winner: None,
        }
    }

    /// The same position with `seat` on move (for threat detection).
    pub fn with_to_move(mut self, seat: usize) -> Self {
        self.to_act = seat;
        self
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn to_move(&self) -> usize {
        self.to_act
    }

    pub fn winner(&self) -> Option<usize> {
        self.winner
    }

    pub fn is_over(&self) -> bool {
        self.winner.is_some() || self.placed == ROWS * COLS
    }

    pub fn can_play(&self, col: usize) -> bool {
        col < COLS && self.cells[col] == 0
    }

    /// Drops a piece for the side to move; returns the row it landed in.
    pub fn drop_piece(&mut self, col: usize) -> usize {
        let row = (0..ROWS)
            .rev()
            .find(|&r| self.cells[r * COLS + col] == 0)
            .expect("column has space");
        let piece = self.to_act as u8 + 1;
        self.cells[row * COLS + col] = piece;
        self.placed += 1;
        if self.connects(row, col, piece) {
            self.winner = Some(self.to_act);
        }
        self.to_act = 1 - self.to_act;
        row
    }

    /// Removes the top piece of `col` (search undo).
    pub fn undo(&mut self, col: usize) {
        let row = (0..ROWS)
            .find(|&r| self.cells[r * COLS + col] != 0)
            .expect("column has a piece");
        self.cells[row * COLS + col] = 0;
        self.placed -= 1;
        self.winner = None;
        self.to_act = 1 - self.to_act;
    }

    fn at(&self, r: isize, c: isize) -> u8 {
        if (0..ROWS as isize).contains(&r) && (0..COLS as isize).contains(&c) {
            self.cells[r as usize * COLS + c as usize]
        } else {
            0
        }
    }

    fn connects(&self, row: usize, col: usize, piece: u8) -> bool {
        let (r, c) = (row as isize, col as isize);
        [(0, 1), (1, 0), (1, 1), (1, -1)].iter().any(|&(dr, dc)| {
            let run = |sign: isize| {
                (1..4)
                    .take_while(|k| self.at(r + sign * k * dr, c + sign * k * dc) == piece)
                    .count()
            };
            1 + run(1) + run(-1) >= 4
        })
    }

    /// Number of open windows of four that contain `n` pieces of `piece` and
    /// no opposing piece. Used by the search heuristic.
    pub fn open_windows(&self, piece: u8, n: usize) -> i32 {
        let mut count = 0;
        for r in 0..ROWS as isize {
            for c in 0..COLS as isize {
                for (dr, dc) in [(0, 1), (1, 0), (1, 1), (1, -1)] {
                    let end_r = r + 3 * dr;
                    let end_c = c + 3 * dc;
                    if !(0..ROWS as isize).contains(&end_r) || !(0..COLS as isize).contains(&end_c)
                    {
                        continue;
                    }
                    let (mut mine, mut other) = (0, 0);
                    for k in 0..4 {
                        let v = self.at(r + k * dr, c + k * dc);
                        if v == piece {
                            mine += 1;
                        } else if v != 0 {
                            other += 1;
                        }
                    }
                    if other == 0 && mine == n {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

impl Default for ConnectFour {
    fn default() -> Self {
        Self::new()
    }
}

impl Rules for ConnectFour {
    fn to_act(&self) -> usize {
        self.to_act
    }

    fn view(&self, _seat: usize) -> Payload {
        Payload::ConnectFour(View {
            cells: self.cells.to_vec(),
        })
    }

    fn fill_mask(&self, _seat: usize, bits: &mut [bool]) {
        for (c, b) in bits.iter_mut().enumerate() {
            *b = self.can_play(c);
        }
    }

    fn play(&mut self, _seat: usize, action: usize, _rng: &mut ArenaRng) {
        self.drop_piece(action);
    }

    fn finish(&self) -> Option<Finish> {
        self.is_over().then(|| Finish {
            scores: duel_scores(self.winner),
            success: None,
        })
    }

    fn cut_off(&self) -> Finish {
        Finish {
            scores: duel_scores(None),
            success: None,
        }
    }
}
