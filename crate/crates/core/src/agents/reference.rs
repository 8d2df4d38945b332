use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;

use super::{Agent, Decision, DecisionOutcome, DecisionRequest, MatchContext};
use crate::engine::{ActionMask, FailureKind, GameId, Payload};
use crate::games::connect4::{ConnectFour, COLS, ROWS};
use crate::games::{hanoi, holdem, maze, reversi, snake, sudoku, tictactoe, twenty48};

/// Search depth of the Connect Four reference.
pub const CONNECT4_DEPTH: u32 = 6;

/// Deterministic, oracle-strength baseline for one game: exact minimax for
/// Tic-Tac-Toe, depth-6 alpha-beta for Connect Four, mobility-greedy
/// Reversi, wall-avoiding food chasing for Snake, a backtracking Sudoku
/// solver, one-ply greedy 2048, optimal Hanoi, BFS (or frontier exploration
/// under partial visibility) for mazes and call-any Hold'em.
#[derive(Debug, Clone)]
pub struct ReferenceAgent {
    id: String,
    game: GameId,
    /// Partial-visibility maze memory: known cells and visited cells.
    known: BTreeMap<(usize, usize), bool>,
    visited: BTreeSet<(usize, usize)>,
}

impl ReferenceAgent {
    pub fn new(id: impl Into<String>, game: GameId) -> Self {
        ReferenceAgent {
            id: id.into(),
            game,
            known: BTreeMap::new(),
            visited: BTreeSet::new(),
        }
    }

    pub fn game(&self) -> GameId {
        self.game
    }

    fn choose(&mut self, seat: usize, payload: &Payload, mask: &ActionMask) -> Option<usize> {
        match payload {
            Payload::TicTacToe(v) => {
                let mut cells = [0u8; 9];
                cells.copy_from_slice(&v.cells[..9]);
                let to_act = usize::from(cells.iter().filter(|c| **c != 0).count() % 2 == 1);
                tictactoe::best_move(&cells, to_act)
            }
            Payload::ConnectFour(v) => connect4_move(&v.cells),
            Payload::Reversi(v) => reversi_move(&v.cells, seat),
            Payload::Snake(v) => snake_move(v, seat),
            Payload::Sudoku(v) => sudoku_move(&v.grid),
            Payload::Twenty48(v) => twenty48_move(&v.board),
            Payload::Hanoi(v) => hanoi::next_optimal_move(&hanoi::Hanoi::from_pegs(v.pegs.clone())),
            Payload::Maze(v) => self.maze_move(v),
            Payload::Holdem(_) => [holdem::CALL, holdem::ALL_IN, holdem::FOLD]
                .into_iter()
                .find(|&a| mask.is_legal(a)),
        }
    }

    fn maze_move(&mut self, v: &maze::View) -> Option<usize> {
        let w = &v.window;
        for r in 0..w.rows {
            for c in 0..w.cols {
                self.known
                    .insert((w.row + r, w.col + c), w.cells[r * w.cols + c] == 0);
            }
        }
        let here = (v.position[0], v.position[1]);
        let exit = (v.exit[0], v.exit[1]);
        self.visited.insert(here);
        // Breadth-first over known open cells; stop at the exit if reachable,
        // otherwise at the nearest open cell not yet visited.
        let mut first_step: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut queue = VecDeque::from([here]);
        let mut seen = BTreeSet::from([here]);
        let mut frontier = None;
        while let Some(p) = queue.pop_front() {
            if p == exit {
                return first_step.get(&p).copied();
            }
            if frontier.is_none() && !self.visited.contains(&p) {
                frontier = Some(p);
            }
            for (d, &(dr, dc)) in maze::DELTAS.iter().enumerate() {
                let Some(n) = p.0.checked_add_signed(dr).zip(p.1.checked_add_signed(dc)) else {
                    continue;
                };
                if self.known.get(&n) == Some(&true) && seen.insert(n) {
                    let step = if p == here { d } else { first_step[&p] };
                    first_step.insert(n, step);
                    queue.push_back(n);
                }
            }
        }
        frontier.and_then(|p| first_step.get(&p).copied())
    }
}

fn connect4_eval(pos: &ConnectFour, me: u8) -> i32 {
    let opp = 3 - me;
    let center = (0..ROWS)
        .map(|r| pos.cells()[r * COLS + COLS / 2])
        .map(|v| i32::from(v == me) - i32::from(v == opp))
        .sum::<i32>();
    3 * center + 5 * pos.open_windows(me, 3) + 2 * pos.open_windows(me, 2)
        - 5 * pos.open_windows(opp, 3)
        - 2 * pos.open_windows(opp, 2)
}

const WIN: i32 = 1_000_000;
const ORDER: [usize; COLS] = [3, 2, 4, 1, 5, 0, 6];

/// Negamax value for the side to move.
fn negamax(pos: &mut ConnectFour, depth: u32, mut alpha: i32, beta: i32) -> i32 {
    if pos.winner().is_some() {
        // The previous mover won.
        return -(WIN + depth as i32);
    }
    if pos.is_over() {
        return 0;
    }
    if depth == 0 {
        return connect4_eval(pos, pos.to_move() as u8 + 1);
    }
    let mut best = i32::MIN + 1;
    for c in ORDER {
        if !pos.can_play(c) {
            continue;
        }
        pos.drop_piece(c);
        let v = -negamax(pos, depth - 1, -beta, -alpha);
        pos.undo(c);
        best = best.max(v);
        alpha = alpha.max(v);
        if alpha >= beta {
            break;
        }
    }
    best
}

pub fn connect4_move(cells: &[u8]) -> Option<usize> {
    let mut pos = ConnectFour::from_cells(cells);
    let mut best = None;
    let mut alpha = i32::MIN + 1;
    for c in ORDER {
        if !pos.can_play(c) {
            continue;
        }
        pos.drop_piece(c);
        let v = -negamax(&mut pos, CONNECT4_DEPTH - 1, i32::MIN + 1, -alpha);
        pos.undo(c);
        if best.is_none() || v > alpha {
            alpha = v;
            best = Some(c);
        }
    }
    best
}

/// The placement leaving the opponent the fewest replies; ties go to more
/// flips, then the lowest square.
pub fn reversi_move(cells: &[u8], seat: usize) -> Option<usize> {
    let mut board = [0u8; 64];
    board.copy_from_slice(&cells[..64]);
    let moves = reversi::placements(&board, seat);
    if moves.is_empty() {
        return Some(reversi::PASS);
    }
    moves.into_iter().min_by_key(|&sq| {
        let flips = reversi::flips(&board, seat, sq).len();
        let mut next = board;
        reversi::place(&mut next, seat, sq);
        let replies = reversi::placements(&next, 1 - seat).len();
        (replies, usize::MAX - flips, sq)
    })
}

pub fn snake_move(v: &snake::View, seat: usize) -> Option<usize> {
    let me = &v.snakes[seat].body;
    let them = &v.snakes[1 - seat];
    let n = v.size as i32;
    let [hr, hc] = me[0];
    let blocked = |r: i32, c: i32| {
        if !(0..n).contains(&r) || !(0..n).contains(&c) {
            return true;
        }
        // Tails move away this tick unless the snake eats; treat them as free.
        let hit = |body: &[[i32; 2]]| body[..body.len() - 1].contains(&[r, c]);
        hit(me) || (them.alive && hit(&them.body))
    };
    let risky = |r: i32, c: i32| {
        them.alive
            && them.body.len() >= me.len()
            && snake::DELTAS
                .iter()
                .any(|&(dr, dc)| [them.body[0][0] + dr, them.body[0][1] + dc] == [r, c])
    };
    let dist = |r: i32, c: i32| v.food.map_or(0, |[fr, fc]| (fr - r).abs() + (fc - c).abs());
    (0..4)
        .filter(|&d| {
            let (dr, dc) = snake::DELTAS[d];
            !blocked(hr + dr, hc + dc)
        })
        .min_by_key(|&d| {
            let (dr, dc) = snake::DELTAS[d];
            let (r, c) = (hr + dr, hc + dc);
            (risky(r, c), dist(r, c), d)
        })
        .or(Some(0))
}

/// Fills the first empty cell with its digit from the unique solution.
pub fn sudoku_move(grid: &[u8]) -> Option<usize> {
    let mut g = [0u8; 81];
    g.copy_from_slice(&grid[..81]);
    let solved = sudoku::solve(&g).grid?;
    let i = g.iter().position(|&v| v == 0)?;
    Some(sudoku::encode(i / 9, i % 9, solved[i]))
}

/// Maximizes merge score, then empty cells, over the effective slides.
pub fn twenty48_move(board: &[u32]) -> Option<usize> {
    let mut b = [0u32; 16];
    b.copy_from_slice(&board[..16]);
    (0..4)
        .filter(|&d| twenty48::can_move(&b, d))
        .max_by_key(|&d| {
            let (next, gain) = twenty48::slide(&b, d);
            let empty = next.iter().filter(|t| **t == 0).count();
            (gain, empty, core::cmp::Reverse(d))
        })
}

impl Agent for ReferenceAgent {
    fn id(&self) -> &str {
        &self.id
    }

    fn begin_match(&mut self, _ctx: &MatchContext<'_>) -> Result<(), FailureKind> {
        self.known.clear();
        self.visited.clear();
        Ok(())
    }

    fn decide(&mut self, request: &DecisionRequest<'_>) -> DecisionOutcome {
        let obs = request.observation;
        let choice = self
            .choose(obs.seat, &obs.payload, request.mask)
            .filter(|&a| request.mask.is_legal(a))
            .or_else(|| request.mask.first_legal());
        DecisionOutcome::unmetered(match choice {
            Some(a) => Decision::Action(a),
            None => Decision::NoAction,
        })
    }
}
