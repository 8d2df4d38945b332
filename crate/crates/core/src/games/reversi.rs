//! Reversi (Othello) on 8x8. Seat 0 plays black and moves first. Squares are
//! row-major (`row * 8 + col`, a1 = 0); action 64 is an explicit pass, legal
//! only when no flipping move exists.

use alloc::vec::Vec;

use serde::Serialize;

use super::duel_scores;
use crate::engine::{Finish, Payload, Rules};
use crate::seed::ArenaRng;

pub const ACTIONS: usize = 65;
pub const PASS: usize = 64;

pub const OBSERVATION_SCHEMA: &str =
    "{\"seat\": int, \"to_act\": int|null, \"cells\": [int; 64], \"passes\": int} \
cells are row-major (index = row * 8 + col); 0 = empty, 1 = seat 0 (black), 2 = seat 1 (white). \
passes counts consecutive passes so far (two end the game).";

pub const ACTION_ENCODING: &str =
    "action i in 0..64 places a disc on square i (row = i / 8, col = i % 8); \
action 64 passes and is legal only when no placement flips a disc.";

const DIRS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub cells: Vec<u8>,
    pub passes: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reversi {
    cells: [u8; 64],
    to_act: usize,
    passes: u8,
}

impl Reversi {
    pub fn new() -> Self {
        let mut cells = [0u8; 64];
        cells[3 * 8 + 3] = 2; // d4
        cells[4 * 8 + 4] = 2; // e5
        cells[3 * 8 + 4] = 1; // e4
        cells[4 * 8 + 3] = 1; // d5
        Reversi {
            cells,
            to_act: 0,
            passes: 0,
        }
    }

    pub fn from_parts(cells: [u8; 64], to_act: usize, passes: u8) -> Self {
        Reversi {
            cells,
            to_act,
            passes,
        }
    }

    pub fn cells(&self) -> &[u8; 64] {
        &self.cells
    }

    pub fn discs(&self, seat: usize) -> usize {
        let p = seat as u8 + 1;
        self.cells.iter().filter(|c| **c == p).count()
    }

    pub fn is_over(&self) -> bool {
        self.passes >= 2 || self.cells.iter().all(|c| *c != 0)
    }
}

impl Default for Reversi {
    fn default() -> Self {
        Self::new()
    }
}

/// Squares flipped by `seat` placing on `square`; empty when illegal.
pub fn flips(cells: &[u8; 64], seat: usize, square: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if cells[square] != 0 {
        return out;
    }
    let me = seat as u8 + 1;
    let them = 3 - me;
    let (r0, c0) = ((square / 8) as isize, (square % 8) as isize);
    for (dr, dc) in DIRS {
        let mut run = Vec::new();
        let (mut r, mut c) = (r0 + dr, c0 + dc);
        while (0..8).contains(&r) && (0..8).contains(&c) && cells[(r * 8 + c) as usize] == them {
            run.push((r * 8 + c) as usize);
            r += dr;
            c += dc;
        }
        if !run.is_empty()
            && (0..8).contains(&r)
            && (0..8).contains(&c)
            && cells[(r * 8 + c) as usize] == me
        {
            out.extend(run);
        }
    }
    out
}

/// Placements available to `seat` (excluding pass).
pub fn placements(cells: &[u8; 64], seat: usize) -> Vec<usize> {
    (0..64)
        .filter(|&sq| !flips(cells, seat, sq).is_empty())
        .collect()
}

/// Places a disc (assumed legal) and flips.
pub fn place(cells: &mut [u8; 64], seat: usize, square: usize) {
    let f = flips(cells, seat, square);
    let me = seat as u8 + 1;
    cells[square] = me;
    for sq in f {
        cells[sq] = me;
    }
}

impl Rules for Reversi {
    fn to_act(&self) -> usize {
        self.to_act
    }

    fn view(&self, _seat: usize) -> Payload {
        Payload::Reversi(View {
            cells: self.cells.to_vec(),
            passes: self.passes,
        })
    }

    fn fill_mask(&self, seat: usize, bits: &mut [bool]) {
        let moves = placements(&self.cells, seat);
        for &m in &moves {
            bits[m] = true;
        }
        bits[PASS] = moves.is_empty();
    }

    fn play(&mut self, seat: usize, action: usize, _rng: &mut ArenaRng) {
        if action == PASS {
            self.passes += 1;
        } else {
            place(&mut self.cells, seat, action);
            self.passes = 0;
        }
        self.to_act = 1 - seat;
    }

    fn finish(&self) -> Option<Finish> {
        if !self.is_over() {
            return None;
        }
        let (b, w) = (self.discs(0), self.discs(1));
        let winner = match b.cmp(&w) {
            core::cmp::Ordering::Greater => Some(0),
            core::cmp::Ordering::Less => Some(1),
            core::cmp::Ordering::Equal => None,
        };
        Some(Finish {
            scores: duel_scores(winner),
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
    use crate::engine::{GameConfig, GameDescriptor};
    use crate::games::make_reversi;
    use crate::GameState;

    /// Legality by the definition: some direction has a contiguous run of
    /// opposing discs closed by an own disc.
    fn brute_legal(cells: &[u8; 64], seat: usize) -> Vec<usize> {
        let me = seat as u8 + 1;
        let mut out = Vec::new();
        for sq in 0..64 {
            if cells[sq] != 0 {
                continue;
            }
            let (r, c) = ((sq / 8) as i32, (sq % 8) as i32);
            let mut ok = false;
            for dr in -1..=1 {
                for dc in -1..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let mut k = 1;
                    loop {
                        let (rr, cc) = (r + k * dr, c + k * dc);
                        if !(0..8).contains(&rr) || !(0..8).contains(&cc) {
                            break;
                        }
                        let v = cells[(rr * 8 + cc) as usize];
                        if v == 0 {
                            break;
                        }
                        if v == me {
                            ok |= k > 1;
                            break;
                        }
                        k += 1;
                    }
                }
            }
            if ok {
                out.push(sq);
            }
        }
        out
    }

    #[test]
    fn initial_black_has_four_moves() {
        let s = GameState::new(&make_reversi(), 0).unwrap();
        let mask = s.legal_mask(0);
        assert_eq!(mask.count(), 4);
        let moves: Vec<usize> = mask.legal_actions().collect();
        // d3, c4, f5, e6
        assert_eq!(moves, vec![2 * 8 + 3, 3 * 8 + 2, 4 * 8 + 5, 5 * 8 + 4]);
        assert_eq!(moves, brute_legal(Reversi::new().cells(), 0));
    }

    #[test]
    fn pass_is_only_move_without_flips() {
        // Black has a single disc surrounded by nothing to flip.
        let mut cells = [0u8; 64];
        cells[0] = 1;
        cells[63] = 2;
        let b = Reversi::from_parts(cells, 0, 0);
        let d = GameDescriptor::new(GameConfig::Reversi).unwrap();
        let s = GameState::from_board(d, crate::engine::Board::Reversi(b), crate::seed::rng(0));
        let mask = s.legal_mask(0);
        assert_eq!(mask.legal_actions().collect::<Vec<_>>(), vec![PASS]);
    }

    #[test]
    fn disc_count_decides_winner() {
        let mut cells = [1u8; 64];
        for c in cells.iter_mut().take(31) {
            *c = 2;
        }
        let b = Reversi::from_parts(cells, 0, 0);
        let fin = b.finish().unwrap();
        assert_eq!(b.discs(0), 33);
        assert_eq!(fin.scores, vec![1.0, -1.0]);
    }

    #[test]
    fn mask_matches_brute_force_along_random_games() {
        use rand::seq::IteratorRandom;
        let mut rng = crate::seed::rng(11);
        for g in 0..20 {
            let mut s = GameState::new(&make_reversi(), g).unwrap();
            let mut placed = 0usize;
            let mut passes = 0usize;
            while let Some(seat) = s.to_act() {
                let crate::engine::Payload::Reversi(v) = s.observe(seat).unwrap().payload else {
                    unreachable!()
                };
                let mut cells = [0u8; 64];
                cells.copy_from_slice(&v.cells);
                let mask = s.legal_mask(seat);
                let brute = brute_legal(&cells, seat);
                let placements: Vec<usize> = mask.legal_actions().filter(|a| *a != PASS).collect();
                assert_eq!(placements, brute);
                assert_eq!(mask.is_legal(PASS), brute.is_empty());
                let a = mask.legal_actions().choose(&mut rng).unwrap();
                if a == PASS {
                    passes += 1;
                } else {
                    placed += 1;
                }
                s.apply(seat, a).unwrap();
                let total: usize = match s.observe(0).unwrap().payload {
                    crate::engine::Payload::Reversi(v) => {
                        v.cells.iter().filter(|c| **c != 0).count()
                    }
                    _ => unreachable!(),
                };
                assert_eq!(total, 4 + placed);
            }
            assert!(s.step_index() as usize == placed + passes);
        }
    }
}
