//! Tic-Tac-Toe. Cells are row-major 0..9; 0 = empty, 1 = seat 0 (X),
//! 2 = seat 1 (O). Seat 0 moves first.

use alloc::vec::Vec;

use serde::Serialize;

use super::duel_scores;
use crate::engine::{Finish, Payload, Rules};
use crate::seed::ArenaRng;

pub const OBSERVATION_SCHEMA: &str = "{\"seat\": int, \"to_act\": int|null, \"cells\": [int; 9]} \
cells are row-major; 0 = empty, 1 = seat 0 (X), 2 = seat 1 (O). Encoding is absolute, not relative to the viewer.";

pub const ACTION_ENCODING: &str = "action a in 0..9 marks cell a (row = a / 3, column = a % 3):\n\
 0 | 1 | 2\n3 | 4 | 5\n6 | 7 | 8";

pub const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub cells: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TicTacToe {
    cells: [u8; 9],
    to_act: usize,
}

impl TicTacToe {
    pub fn new() -> Self {
        TicTacToe {
            cells: [0; 9],
            to_act: 0,
        }
    }

    /// Builds a position from cell codes; the side to act is derived from
    /// the piece counts.
    pub fn from_cells(cells: [u8; 9]) -> Self {
        let x = cells.iter().filter(|c| **c == 1).count();
        let o = cells.iter().filter(|c| **c == 2).count();
        TicTacToe {
            cells,
            to_act: usize::from(x > o),
        }
    }

    pub fn cells(&self) -> &[u8; 9] {
        &self.cells
    }
}

impl Default for TicTacToe {
    fn default() -> Self {
        Self::new()
    }
}

/// The seat (0 or 1) owning a completed line, if any.
pub fn winner(cells: &[u8; 9]) -> Option<usize> {
    LINES.iter().find_map(|l| {
        let c = cells[l[0]];
        (c != 0 && c == cells[l[1]] && c == cells[l[2]]).then(|| usize::from(c) - 1)
    })
}

fn is_full(cells: &[u8; 9]) -> bool {
    cells.iter().all(|c| *c != 0)
}

/// Exact game-theoretic value (-1, 0, +1) for the side to act.
pub fn minimax_value(cells: &[u8; 9], to_act: usize) -> i8 {
    let mut c = *cells;
    negamax(&mut c, to_act, 0).signum() as i8
}

/// Negamax with a depth term so faster wins score higher. Returns a value in
/// (-10, 10); the sign is the game value for `to_act`.
fn negamax(cells: &mut [u8; 9], to_act: usize, depth: i32) -> i32 {
    if let Some(w) = winner(cells) {
        return if w == to_act { 10 - depth } else { depth - 10 };
    }
    if is_full(cells) {
        return 0;
    }
    let mut best = i32::MIN;
    for i in 0..9 {
        if cells[i] == 0 {
            cells[i] = to_act as u8 + 1;
            let v = -negamax(cells, 1 - to_act, depth + 1);
            cells[i] = 0;
            best = best.max(v);
        }
    }
    best
}

/// Best move for the side to act: the lowest-index move among those with
/// maximal depth-adjusted value.
pub fn best_move(cells: &[u8; 9], to_act: usize) -> Option<usize> {
    let mut c = *cells;
    let mut best: Option<(usize, i32)> = None;
    for i in 0..9 {
        if c[i] == 0 {
            c[i] = to_act as u8 + 1;
            let v = -negamax(&mut c, 1 - to_act, 1);
            c[i] = 0;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

impl Rules for TicTacToe {
    fn to_act(&self) -> usize {
        self.to_act
    }

    fn view(&self, _seat: usize) -> Payload {
        Payload::TicTacToe(View {
            cells: self.cells.to_vec(),
        })
    }

    fn fill_mask(&self, _seat: usize, bits: &mut [bool]) {
        for (b, c) in bits.iter_mut().zip(self.cells.iter()) {
            *b = *c == 0;
        }
    }

    fn play(&mut self, seat: usize, action: usize, _rng: &mut ArenaRng) {
        self.cells[action] = seat as u8 + 1;
        self.to_act = 1 - seat;
    }

    fn finish(&self) -> Option<Finish> {
        if let Some(w) = winner(&self.cells) {
            return Some(Finish {
                scores: duel_scores(Some(w)),
                success: None,
            });
        }
        is_full(&self.cells).then(|| Finish {
            scores: duel_scores(None),
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::make_tictactoe;
    use crate::GameState;

    fn play(moves: &[usize]) -> GameState {
        let mut s = GameState::new(&make_tictactoe(), 0).unwrap();
        for &m in moves {
            let seat = s.to_act().unwrap();
            s.apply(seat, m).unwrap();
        }
        s
    }

    #[test]
    fn descriptor_constants() {
        let d = make_tictactoe();
        assert_eq!(d.action_space, 9);
        assert_eq!(d.seats, 2);
    }

    #[test]
    fn initial_state_is_empty_with_seat_zero_to_act() {
        let s = play(&[]);
        assert_eq!(s.to_act(), Some(0));
        assert_eq!(s.legal_mask(0).count(), 9);
        let crate::engine::Payload::TicTacToe(v) = s.observe(0).unwrap().payload else {
            panic!()
        };
        assert_eq!(v.cells, [0; 9]);
    }

    #[test]
    fn observation_is_absolute() {
        let s = play(&[4, 0]);
        let obs = s.observe(0).unwrap();
        assert_eq!(obs.to_act, Some(0));
        let crate::engine::Payload::TicTacToe(v) = obs.payload else {
            panic!()
        };
        assert_eq!(v.cells, [2, 0, 0, 0, 1, 0, 0, 0, 0]);
        // Seat 1 sees the same encoding.
        assert_eq!(
            s.observe(1).unwrap().payload,
            play(&[4, 0]).observe(0).unwrap().payload
        );
    }

    #[test]
    fn diagonal_wins_for_seat_zero() {
        let s = play(&[0, 1, 4, 2, 8]);
        assert!(s.is_terminal());
        assert_eq!(s.scores(), &[1.0, -1.0]);
    }

    #[test]
    fn completing_top_row_ends_game() {
        // X at {0,1}, O at {3,4}, X plays 2.
        let s = play(&[0, 3, 1, 4, 2]);
        assert!(s.is_terminal());
        assert_eq!(s.scores(), &[1.0, -1.0]);
        assert!(s.legal_mask(1).is_all_false());
    }

    #[test]
    fn occupied_cell_is_a_rule_violation() {
        let mut s = play(&[4]);
        assert_eq!(
            s.apply(1, 4),
            Err(crate::engine::EngineError::RuleViolation { seat: 1, action: 4 })
        );
        assert!(s.apply(0, 0).is_err(), "wrong seat");
    }

    #[test]
    fn minimax_values() {
        assert_eq!(minimax_value(&[0; 9], 0), 0);
        // X:{0,1}, O:{3,4}, X to act: immediate win at 2.
        assert_eq!(minimax_value(&[1, 1, 0, 2, 2, 0, 0, 0, 0], 0), 1);
        // Same position with O to act: O completes 3-4-5.
        assert_eq!(minimax_value(&[1, 1, 0, 2, 2, 0, 0, 1, 0], 1), 1);
        // X has a fork (0 and 8 with 4 taken by O is not enough): X at 0,8,
        // O at 4 and 1; X to act must block 7 and O then draws.
        assert_eq!(minimax_value(&[1, 2, 0, 0, 2, 0, 0, 0, 1], 0), 0);
        assert_eq!(best_move(&[1, 1, 0, 2, 2, 0, 0, 0, 0], 0), Some(2));
    }
}
