//! Sudoku played cell by cell. Action `r * 81 + c * 9 + (v - 1)` writes digit
//! `v` at row `r`, column `c`; only placements consistent with the row,
//! column and box are legal and there is no erase. A grid with empty cells
//! but no legal placement ends the episode as a failure.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::engine::{Finish, Payload, Rules};
use crate::seed::{self, ArenaRng};

pub const MIN_CLUES: u32 = 24;
pub const MAX_CLUES: u32 = 40;
const MAX_ATTEMPTS: u64 = 256;

pub type Grid = [u8; 81];

pub const OBSERVATION_SCHEMA: &str = "{\"seat\": 0, \"to_act\": 0|null, \"grid\": [int; 81]} \
grid is row-major (index = row * 9 + col); 0 = empty, 1..9 = digit.";

pub const ACTION_ENCODING: &str = "action = row * 81 + col * 9 + (digit - 1), so 729 actions. \
A bit is true only for an empty cell and a digit not already present in its row, column or 3x3 box. \
Digits cannot be erased; if empty cells remain but no placement is legal the puzzle is failed.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub grid: Vec<u8>,
}

pub const fn encode(row: usize, col: usize, digit: u8) -> usize {
    row * 81 + col * 9 + (digit as usize - 1)
}

pub const fn decode(action: usize) -> (usize, usize, u8) {
    (action / 81, (action / 9) % 9, (action % 9) as u8 + 1)
}

const fn box_of(i: usize) -> usize {
    (i / 27) * 3 + (i % 9) / 3
}

/// Row/column/box digit sets as bitmasks (bit `v` set when digit `v` used).
#[derive(Clone, Copy)]
struct Masks {
    rows: [u16; 9],
    cols: [u16; 9],
    boxes: [u16; 9],
}

impl Masks {
    /// `None` when the givens already conflict.
    fn of(grid: &Grid) -> Option<Masks> {
        let mut m = Masks {
            rows: [0; 9],
            cols: [0; 9],
            boxes: [0; 9],
        };
        for (i, &v) in grid.iter().enumerate() {
            if v == 0 {
                continue;
            }
            if v > 9 {
                return None;
            }
            let bit = 1u16 << v;
            let (r, c, b) = (i / 9, i % 9, box_of(i));
            if (m.rows[r] | m.cols[c] | m.boxes[b]) & bit != 0 {
                return None;
            }
            m.set(i, v);
        }
        Some(m)
    }

    fn candidates(&self, i: usize) -> u16 {
        !(self.rows[i / 9] | self.cols[i % 9] | self.boxes[box_of(i)]) & 0b11_1111_1110
    }

    fn set(&mut self, i: usize, v: u8) {
        let bit = 1u16 << v;
        self.rows[i / 9] |= bit;
        self.cols[i % 9] |= bit;
        self.boxes[box_of(i)] |= bit;
    }

    fn clear(&mut self, i: usize, v: u8) {
        let bit = !(1u16 << v);
        self.rows[i / 9] &= bit;
        self.cols[i % 9] &= bit;
        self.boxes[box_of(i)] &= bit;
    }
}

/// Result of an exhaustive search, stopped after a second solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub grid: Option<Grid>,
    /// 0, 1, or 2 meaning "two or more".
    pub count: u8,
}

pub fn solve(grid: &Grid) -> Solution {
    let Some(mut masks) = Masks::of(grid) else {
        return Solution {
            grid: None,
            count: 0,
        };
    };
    let mut work = *grid;
    let mut first = None;
    let mut count = 0u8;
    search(&mut work, &mut masks, &mut count, &mut first, 2, None);
    Solution { grid: first, count }
}

/// Backtracking with minimum-remaining-values ordering. When `order` is
/// given, candidate digits are tried in that order instead of ascending.
fn search(
    grid: &mut Grid,
    masks: &mut Masks,
    count: &mut u8,
    first: &mut Option<Grid>,
    limit: u8,
    order: Option<&[u8; 9]>,
) {
    let mut best: Option<(usize, u16)> = None;
    for i in 0..81 {
        if grid[i] != 0 {
            continue;
        }
        let cand = masks.candidates(i);
        if cand == 0 {
            return;
        }
        if best.is_none_or(|(_, b)| cand.count_ones() < b.count_ones()) {
            best = Some((i, cand));
            if cand.count_ones() == 1 {
                break;
            }
        }
    }
    let Some((i, cand)) = best else {
        *count += 1;
        if first.is_none() {
            *first = Some(*grid);
        }
        return;
    };
    let digits: [u8; 9] = match order {
        Some(o) => *o,
        None => [1, 2, 3, 4, 5, 6, 7, 8, 9],
    };
    for v in digits {
        if cand & (1 << v) == 0 {
            continue;
        }
        grid[i] = v;
        masks.set(i, v);
        search(grid, masks, count, first, limit, order);
        masks.clear(i, v);
        grid[i] = 0;
        if *count >= limit {
            return;
        }
    }
}

fn random_full(rng: &mut ArenaRng) -> Grid {
    let mut order = [1u8, 2, 3, 4, 5, 6, 7, 8, 9];
    order.shuffle(rng);
    let mut grid = [0u8; 81];
    // Seed the three diagonal boxes independently, then complete.
    for b in 0..3 {
        let mut digits = [1u8, 2, 3, 4, 5, 6, 7, 8, 9];
        digits.shuffle(rng);
        for k in 0..9 {
            grid[(b * 3 + k / 3) * 9 + b * 3 + k % 3] = digits[k];
        }
    }
    let mut masks = Masks::of(&grid).expect("diagonal boxes never conflict");
    let mut first = None;
    let mut count = 0;
    search(
        &mut grid.clone(),
        &mut masks,
        &mut count,
        &mut first,
        1,
        Some(&order),
    );
    first.expect("diagonal-box seeds are always completable")
}

/// A puzzle with exactly `clues` givens and a unique solution. Deterministic
/// in `seed`.
pub fn generate(seed: u64, clues: u32) -> Result<Grid, &'static str> {
    if !(MIN_CLUES..=MAX_CLUES).contains(&clues) {
        return Err("sudoku clue count must be within 24..=40");
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seed::rng(seed::derive(seed, attempt));
        let mut grid = random_full(&mut rng);
        let mut cells: Vec<usize> = (0..81).collect();
        cells.shuffle(&mut rng);
        let mut remaining = 81u32;
        for i in cells {
            if remaining == clues {
                break;
            }
            let v = grid[i];
            grid[i] = 0;
            if solve(&grid).count == 1 {
                remaining -= 1;
            } else {
                grid[i] = v;
            }
        }
        if remaining == clues {
            return Ok(grid);
        }
    }
    Err("no unique-solution sudoku within the retry budget")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sudoku {
    grid: Grid,
}

impl Sudoku {
    pub fn new(grid: Grid) -> Self {
        Sudoku { grid }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn filled(&self) -> usize {
        self.grid.iter().filter(|v| **v != 0).count()
    }
}

impl Rules for Sudoku {
    fn to_act(&self) -> usize {
        0
    }

    fn view(&self, _seat: usize) -> Payload {
        Payload::Sudoku(View {
            grid: self.grid.to_vec(),
        })
    }

    fn fill_mask(&self, _seat: usize, bits: &mut [bool]) {
        let Some(masks) = Masks::of(&self.grid) else {
            return;
        };
        for i in 0..81 {
            if self.grid[i] != 0 {
                continue;
            }
            let cand = masks.candidates(i);
            for v in 1..=9u8 {
                if cand & (1 << v) != 0 {
                    bits[encode(i / 9, i % 9, v)] = true;
                }
            }
        }
    }

    fn play(&mut self, _seat: usize, action: usize, _rng: &mut ArenaRng) {
        let (r, c, v) = decode(action);
        self.grid[r * 9 + c] = v;
    }

    fn finish(&self) -> Option<Finish> {
        (self.filled() == 81).then(|| Finish {
            scores: alloc::vec![81.0],
            success: Some(true),
        })
    }

    fn cut_off(&self) -> Finish {
        Finish {
            scores: alloc::vec![self.filled() as f64],
            success: Some(false),
        }
    }
}
