//! 2048 on a 4x4 board. A move slides every tile toward one edge, merging
//! equal neighbours once per move with priority at the leading edge. The
//! move is legal only if it changes the board; after each move one tile
//! spawns on a uniformly chosen empty cell: 2 with probability 0.9, else 4.

use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use crate::engine::{Finish, Payload, Rules};
use crate::seed::ArenaRng;

pub type Board = [u32; 16];

pub const UP: usize = 0;
pub const RIGHT: usize = 1;
pub const DOWN: usize = 2;
pub const LEFT: usize = 3;

pub const TARGET_TILE: u32 = 2048;
pub const FOUR_PROBABILITY: f64 = 0.1;

pub const OBSERVATION_SCHEMA: &str = "{\"seat\": 0, \"to_act\": 0|null, \"board\": [int; 16], \"score\": int} \
board is row-major 4x4 (row 0 at the top); 0 = empty, otherwise the tile value. score is the sum of all \
tiles created by merges so far.";

pub const ACTION_ENCODING: &str =
    "0 = up, 1 = right, 2 = down, 3 = left. A bit is true only when the slide \
changes the board. The puzzle counts as solved when a 2048 tile exists at the end.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub board: Vec<u32>,
    pub score: u64,
}

/// Slides one line toward index 0. Returns the merge score.
pub fn slide_line(line: &mut [u32; 4]) -> u64 {
    let tiles: Vec<u32> = line.iter().copied().filter(|v| *v != 0).collect();
    let mut out = [0u32; 4];
    let mut score = 0u64;
    let (mut i, mut k) = (0, 0);
    while i < tiles.len() {
        if i + 1 < tiles.len() && tiles[i] == tiles[i + 1] {
            out[k] = tiles[i] * 2;
            score += u64::from(out[k]);
            i += 2;
        } else {
            out[k] = tiles[i];
            i += 1;
        }
        k += 1;
    }
    *line = out;
    score
}

/// Board indices of line `k` for `dir`, ordered from the leading edge.
fn line_indices(dir: usize, k: usize) -> [usize; 4] {
    match dir {
        UP => [k, 4 + k, 8 + k, 12 + k],
        DOWN => [12 + k, 8 + k, 4 + k, k],
        LEFT => [4 * k, 4 * k + 1, 4 * k + 2, 4 * k + 3],
        _ => [4 * k + 3, 4 * k + 2, 4 * k + 1, 4 * k],
    }
}

/// Applies a slide to a copy of the board: (new board, merge score).
pub fn slide(board: &Board, dir: usize) -> (Board, u64) {
    let mut out = *board;
    let mut score = 0;
    for k in 0..4 {
        let idx = line_indices(dir, k);
        let mut line = idx.map(|i| board[i]);
        score += slide_line(&mut line);
        for (j, i) in idx.into_iter().enumerate() {
            out[i] = line[j];
        }
    }
    (out, score)
}

pub fn can_move(board: &Board, dir: usize) -> bool {
    slide(board, dir).0 != *board
}

/// Places one tile on a uniformly chosen empty cell.
pub fn spawn(board: &mut Board, rng: &mut ArenaRng) {
    let empty: Vec<usize> = (0..16).filter(|&i| board[i] == 0).collect();
    if empty.is_empty() {
        return;
    }
    let cell = empty[rng.gen_range(0..empty.len())];
    board[cell] = if rng.gen_bool(FOUR_PROBABILITY) { 4 } else { 2 };
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twenty48 {
    board: Board,
    score: u64,
}

impl Twenty48 {
    pub fn new(rng: &mut ArenaRng) -> Self {
        let mut board = [0; 16];
        spawn(&mut board, rng);
        spawn(&mut board, rng);
        Twenty48 { board, score: 0 }
    }

    pub fn from_board(board: Board, score: u64) -> Self {
        Twenty48 { board, score }
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn score(&self) -> u64 {
        self.score
    }

    fn max_tile(&self) -> u32 {
        self.board.iter().copied().max().unwrap_or(0)
    }
}

impl Rules for Twenty48 {
    fn to_act(&self) -> usize {
        0
    }

    fn view(&self, _seat: usize) -> Payload {
        Payload::Twenty48(View {
            board: self.board.to_vec(),
            score: self.score,
        })
    }

    fn fill_mask(&self, _seat: usize, bits: &mut [bool]) {
        for (d, b) in bits.iter_mut().enumerate() {
            *b = can_move(&self.board, d);
        }
    }

    fn play(&mut self, _seat: usize, action: usize, rng: &mut ArenaRng) {
        let (next, gained) = slide(&self.board, action);
        self.board = next;
        self.score += gained;
        spawn(&mut self.board, rng);
    }

    fn finish(&self) -> Option<Finish> {
        // Play continues past 2048; the episode ends when no slide changes
        // the board.
        (0..4)
            .all(|d| !can_move(&self.board, d))
            .then(|| self.cut_off())
    }

    fn cut_off(&self) -> Finish {
        Finish {
            scores: alloc::vec![self.score as f64],
            success: Some(self.max_tile() >= TARGET_TILE),
        }
    }
}
