//! Grid mazes. Rooms sit at odd coordinates of a W x H grid whose outer ring
//! is wall; the generator carves a perfect maze by randomized depth-first
//! search. The agent starts at the top-left room and must reach the
//! bottom-right room.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::engine::{ConfigError, Finish, GameId, Payload, Rules, Visibility};
use crate::seed::{self, ArenaRng};

pub const MIN_DIM: u32 = 5;
pub const MAX_DIM: u32 = 101;

pub const DELTAS: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

pub const OBSERVATION_SCHEMA: &str = "{\"seat\": 0, \"to_act\": 0|null, \"width\": int, \"height\": int, \
\"position\": [row, col], \"exit\": [row, col], \"window\": {\"row\": int, \"col\": int, \"rows\": int, \"cols\": int, \
\"cells\": [int]}} window is the visible rectangle of the grid with its top-left corner at (row, col); cells are \
row-major within the window, 0 = open, 1 = wall. In full-visibility mazes the window is the whole grid; \
with a visibility radius r it is the square of side 2r+1 around the agent, clipped to the grid.";

pub const ACTION_ENCODING: &str =
    "0 = up (row - 1), 1 = right (col + 1), 2 = down (row + 1), 3 = left (col - 1). \
A bit is true only when the neighbouring cell is open. Solved on reaching the exit.";

pub type Pos = (usize, usize);

/// A maze layout: `open[r * width + c]` is true for passable cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeGrid {
    pub width: usize,
    pub height: usize,
    pub open: Vec<bool>,
    pub start: Pos,
    pub exit: Pos,
}

impl MazeGrid {
    /// Parses rows of `#` (wall) and `.` (open); start and exit are given.
    pub fn from_rows(rows: &[&str], start: Pos, exit: Pos) -> MazeGrid {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let open = rows
            .iter()
            .flat_map(|r| r.bytes().map(|b| b != b'#'))
            .collect();
        MazeGrid {
            width,
            height,
            open,
            start,
            exit,
        }
    }

    pub fn is_open(&self, (r, c): Pos) -> bool {
        r < self.height && c < self.width && self.open[r * self.width + c]
    }

    pub fn step(&self, (r, c): Pos, dir: usize) -> Option<Pos> {
        let (dr, dc) = DELTAS[dir];
        let next = (r.checked_add_signed(dr)?, c.checked_add_signed(dc)?);
        self.is_open(next).then_some(next)
    }

    /// Number of open cells.
    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|o| **o).count()
    }
}

pub fn check_dims(width: u32, height: u32) -> Result<(), ConfigError> {
    for d in [width, height] {
        if d % 2 == 0 {
            return Err(ConfigError::invalid(
                GameId::Maze,
                "width and height must be odd",
            ));
        }
        if !(MIN_DIM..=MAX_DIM).contains(&d) {
            return Err(ConfigError::invalid(
                GameId::Maze,
                "width and height must be within 5..=101",
            ));
        }
    }
    Ok(())
}

/// Carves a perfect maze. Deterministic in `seed`.
pub fn generate(width: usize, height: usize, seed: u64) -> Result<MazeGrid, ConfigError> {
    check_dims(width as u32, height as u32)?;
    let mut rng = seed::rng(seed::derive(seed, seed::tag_of("maze")));
    let mut open = vec![false; width * height];
    let start: Pos = (1, 1);
    open[width + 1] = true;
    let mut stack = vec![start];
    while let Some(&(r, c)) = stack.last() {
        let mut dirs = [0, 1, 2, 3];
        dirs.shuffle(&mut rng);
        let next = dirs.into_iter().find_map(|d| {
            let (dr, dc) = DELTAS[d];
            let nr = r.checked_add_signed(2 * dr)?;
            let nc = c.checked_add_signed(2 * dc)?;
            (nr < height - 1 && nc < width - 1 && !open[nr * width + nc]).then_some((d, nr, nc))
        });
        match next {
            Some((d, nr, nc)) => {
                let (dr, dc) = DELTAS[d];
                let wr = (r as isize + dr) as usize;
                let wc = (c as isize + dc) as usize;
                open[wr * width + wc] = true;
                open[nr * width + nc] = true;
                stack.push((nr, nc));
            }
            None => {
                stack.pop();
            }
        }
    }
    Ok(MazeGrid {
        width,
        height,
        open,
        start,
        exit: (height - 2, width - 2),
    })
}

/// Shortest path length from start to exit by breadth-first search.
pub fn shortest_path(maze: &MazeGrid) -> Option<usize> {
    bfs_route(maze, maze.start, maze.exit).map(|route| route.len())
}

/// Directions of a shortest route from `from` to `to`.
pub fn bfs_route(maze: &MazeGrid, from: Pos, to: Pos) -> Option<Vec<usize>> {
    let idx = |(r, c): Pos| r * maze.width + c;
    let mut prev: Vec<Option<(Pos, usize)>> = vec![None; maze.width * maze.height];
    let mut seen = vec![false; maze.width * maze.height];
    let mut queue = VecDeque::from([from]);
    seen[idx(from)] = true;
    while let Some(p) = queue.pop_front() {
        if p == to {
            let mut route = Vec::new();
            let mut cur = p;
            while let Some((q, d)) = prev[idx(cur)] {
                route.push(d);
                cur = q;
            }
            route.reverse();
            return Some(route);
        }
        for d in 0..4 {
            if let Some(n) = maze.step(p, d) {
                if !seen[idx(n)] {
                    seen[idx(n)] = true;
                    prev[idx(n)] = Some((p, d));
                    queue.push_back(n);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub row: usize,
    pub col: usize,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct View {
    pub width: usize,
    pub height: usize,
    pub position: [usize; 2],
    pub exit: [usize; 2],
    pub window: Window,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Maze {
    grid: MazeGrid,
    visibility: Visibility,
    position: Pos,
    steps: u64,
}

impl Maze {
    pub fn new(grid: MazeGrid, visibility: Visibility) -> Self {
        let position = grid.start;
        Maze {
            grid,
            visibility,
            position,
            steps: 0,
        }
    }

    pub fn grid(&self) -> &MazeGrid {
        &self.grid
    }

    pub fn position(&self) -> Pos {
        self.position
    }

    fn window(&self) -> Window {
        let (r, c) = self.position;
        let (r0, c0, r1, c1) = match self.visibility {
            Visibility::Full => (0, 0, self.grid.height, self.grid.width),
            Visibility::Radius(k) => {
                let k = k as usize;
                (
                    r.saturating_sub(k),
                    c.saturating_sub(k),
                    (r + k + 1).min(self.grid.height),
                    (c + k + 1).min(self.grid.width),
                )
            }
        };
        let mut cells = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for rr in r0..r1 {
            for cc in c0..c1 {
                cells.push(u8::from(!self.grid.is_open((rr, cc))));
            }
        }
        Window {
            row: r0,
            col: c0,
            rows: r1 - r0,
            cols: c1 - c0,
            cells,
        }
    }
}

impl Rules for Maze {
    fn to_act(&self) -> usize {
        0
    }

    fn view(&self, _seat: usize) -> Payload {
        Payload::Maze(View {
            width: self.grid.width,
            height: self.grid.height,
            position: [self.position.0, self.position.1],
            exit: [self.grid.exit.0, self.grid.exit.1],
            window: self.window(),
        })
    }

    fn fill_mask(&self, _seat: usize, bits: &mut [bool]) {
        for (d, b) in bits.iter_mut().enumerate() {
            *b = self.grid.step(self.position, d).is_some();
        }
    }

    fn play(&mut self, _seat: usize, action: usize, _rng: &mut ArenaRng) {
        self.position = self.grid.step(self.position, action).expect("legal move");
        self.steps += 1;
    }

    fn finish(&self) -> Option<Finish> {
        (self.position == self.grid.exit).then(|| self.cut_off())
    }

    /// Score 1 when the exit is reached, else 0.
    fn cut_off(&self) -> Finish {
        let solved = self.position == self.grid.exit;
        Finish {
            scores: vec![if solved { 1.0 } else { 0.0 }],
            success: Some(solved),
        }
    }
}
