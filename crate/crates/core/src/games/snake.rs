//! Two-player Snake on an n x n board with simultaneous moves.
//!
//! Each tick collects seat 0's move, then seat 1's, then resolves both at
//! once. Seat 1 decides on the same (pre-tick) position seat 0 saw; pending
//! moves are never revealed. One food item is on the board at a time and
//! respawns uniformly over empty cells when eaten.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use super::duel_scores;
use crate::engine::{Finish, Payload, Rules};
use crate::seed::ArenaRng;

pub const MIN_SIZE: u32 = 6;
pub const MAX_SIZE: u32 = 64;
pub const START_LEN: usize = 3;

pub const OBSERVATION_SCHEMA: &str = "{\"seat\": int, \"to_act\": int|null, \"size\": int, \"tick\": int, \
\"snakes\": [{\"body\": [[row, col], ...], \"alive\": bool}; 2], \"food\": [row, col]|null} \
body[0] is the head; row 0 is the top edge. snakes[i] belongs to seat i. Both seats choose a move for \
the same tick; moves resolve simultaneously after seat 1 acts.";

pub const ACTION_ENCODING: &str = "0 = up (row - 1), 1 = right (col + 1), 2 = down (row + 1), 3 = left (col - 1). \
Hitting a wall or any body segment kills the snake. A head-on collision kills the shorter snake, or both \
when lengths are equal. Eating food grows the snake by one.";

pub type Cell = (i32, i32);

pub const DELTAS: [(i32, i32); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnakeView {
    pub body: Vec<[i32; 2]>,
    pub alive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub size: usize,
    pub tick: u32,
    pub snakes: Vec<SnakeView>,
    pub food: Option<[i32; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snake {
    size: usize,
    bodies: [VecDeque<Cell>; 2],
    alive: [bool; 2],
    food: Option<Cell>,
    pending: Option<usize>,
    tick: u32,
    max_ticks: u32,
}

impl Snake {
    pub fn new(size: usize, rng: &mut ArenaRng) -> Self {
        let n = size as i32;
        let first: VecDeque<Cell> = (0..START_LEN as i32).map(|k| (1, 3 - k)).collect();
        let second: VecDeque<Cell> = first.iter().map(|&(r, c)| (n - 1 - r, n - 1 - c)).collect();
        let mut s = Snake {
            size,
            bodies: [first, second],
            alive: [true, true],
            food: None,
            pending: None,
            tick: 0,
            max_ticks: 2 * (size * size) as u32,
        };
        s.food = s.spawn_food(rng);
        s
    }

    /// Builds an arbitrary position (tests and search).
    pub fn from_parts(
        size: usize,
        bodies: [Vec<Cell>; 2],
        food: Option<Cell>,
        max_ticks: u32,
    ) -> Self {
        let [a, b] = bodies;
        Snake {
            size,
            bodies: [a.into_iter().collect(), b.into_iter().collect()],
            alive: [true, true],
            food,
            pending: None,
            tick: 0,
            max_ticks,
        }
    }

    pub fn lengths(&self) -> [usize; 2] {
        [self.bodies[0].len(), self.bodies[1].len()]
    }

    pub fn alive(&self) -> [bool; 2] {
        self.alive
    }

    fn spawn_food(&self, rng: &mut ArenaRng) -> Option<Cell> {
        let n = self.size as i32;
        let empty: Vec<Cell> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|cell| !self.bodies.iter().any(|b| b.contains(cell)))
            .collect();
        if empty.is_empty() {
            None
        } else {
            Some(empty[rng.gen_range(0..empty.len())])
        }
    }

    /// Resolves one tick given both moves. Symmetric in the two seats.
    pub fn resolve(&mut self, moves: [usize; 2]) -> [bool; 2] {
        let n = self.size as i32;
        let heads: [Cell; 2] = core::array::from_fn(|i| {
            let (r, c) = self.bodies[i][0];
            let (dr, dc) = DELTAS[moves[i]];
            (r + dr, c + dc)
        });
        let lengths = self.lengths();
        let grows: [bool; 2] = core::array::from_fn(|i| Some(heads[i]) == self.food);
        let mut next = self.bodies.clone();
        for i in 0..2 {
            next[i].push_front(heads[i]);
            if !grows[i] {
                next[i].pop_back();
            }
        }
        let mut dead = [false; 2];
        for i in 0..2 {
            let (r, c) = heads[i];
            let off = !(0..n).contains(&r) || !(0..n).contains(&c);
            let own = next[i].iter().skip(1).any(|x| *x == heads[i]);
            let other = next[1 - i].iter().skip(1).any(|x| *x == heads[i]);
            dead[i] = off || own || other;
        }
        if heads[0] == heads[1] {
            match lengths[0].cmp(&lengths[1]) {
                core::cmp::Ordering::Equal => dead = [true, true],
                core::cmp::Ordering::Less => dead[0] = true,
                core::cmp::Ordering::Greater => dead[1] = true,
            }
        }
        self.bodies = next;
        for i in 0..2 {
            self.alive[i] = !dead[i];
        }
        self.tick += 1;
        grows
    }

    fn view_of(&self) -> View {
        View {
            size: self.size,
            tick: self.tick,
            snakes: (0..2)
                .map(|i| SnakeView {
                    body: self.bodies[i].iter().map(|&(r, c)| [r, c]).collect(),
                    alive: self.alive[i],
                })
                .collect(),
            food: self.food.map(|(r, c)| [r, c]),
        }
    }
}

impl Rules for Snake {
    fn to_act(&self) -> usize {
        usize::from(self.pending.is_some())
    }

    fn view(&self, _seat: usize) -> Payload {
        Payload::Snake(self.view_of())
    }

    fn fill_mask(&self, _seat: usize, bits: &mut [bool]) {
        bits.fill(true);
    }

    fn play(&mut self, seat: usize, action: usize, rng: &mut ArenaRng) {
        if seat == 0 {
            self.pending = Some(action);
            return;
        }
        let first = self.pending.take().expect("seat 0 moved this tick");
        let grows = self.resolve([first, action]);
        if self.alive == [true, true] && grows.iter().any(|g| *g) {
            self.food = self.spawn_food(rng);
        }
    }

    fn finish(&self) -> Option<Finish> {
        let winner = match self.alive {
            [true, true] if self.tick < self.max_ticks => return None,
            [true, true] => match self.bodies[0].len().cmp(&self.bodies[1].len()) {
                core::cmp::Ordering::Greater => Some(0),
                core::cmp::Ordering::Less => Some(1),
                core::cmp::Ordering::Equal => None,
            },
            [true, false] => Some(0),
            [false, true] => Some(1),
            [false, false] => None,
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
