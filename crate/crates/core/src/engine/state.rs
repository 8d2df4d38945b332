use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::descriptor::{ConfigError, GameConfig, GameDescriptor};
use super::mask::ActionMask;
use super::observation::{Observation, Payload};
use crate::games::{connect4, hanoi, holdem, maze, reversi, snake, sudoku, tictactoe, twenty48};
use crate::seed::{self, ArenaRng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("instance generation failed: {0}")]
    Generator(&'static str),
    #[error("seat {seat} out of range for a {seats}-seat game")]
    SeatOutOfRange { seat: usize, seats: usize },
    #[error("rule violation: seat {seat} played action {action}")]
    RuleViolation { seat: usize, action: usize },
}

/// Why an episode ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndReason {
    Natural,
    /// No legal action before the game reached a natural end.
    Stuck,
    StepCap,
}

/// Result of a finished episode as reported by a rules engine.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Finish {
    pub scores: Vec<f64>,
    /// Single-player games only.
    pub success: Option<bool>,
}

/// Per-game rules. Legality has already been checked when `play` is called.
pub(crate) trait Rules {
    fn to_act(&self) -> usize;
    fn view(&self, seat: usize) -> Payload;
    fn fill_mask(&self, seat: usize, bits: &mut [bool]);
    fn play(&mut self, seat: usize, action: usize, rng: &mut ArenaRng);
    fn finish(&self) -> Option<Finish>;

    /// Scores if the episode is cut off now (step cap or stuck state).
    fn cut_off(&self) -> Finish;

    /// Scores when `offender` forfeits. `None` uses the engine default.
    fn forfeit_scores(&self, _offender: usize) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Board {
    TicTacToe(tictactoe::TicTacToe),
    ConnectFour(connect4::ConnectFour),
    Reversi(reversi::Reversi),
    Snake(snake::Snake),
    Sudoku(sudoku::Sudoku),
    Twenty48(twenty48::Twenty48),
    Hanoi(hanoi::Hanoi),
    Maze(maze::Maze),
    Holdem(holdem::Holdem),
}

macro_rules! dispatch {
    ($board:expr, $b:ident => $e:expr) => {
        match $board {
            Board::TicTacToe($b) => $e,
            Board::ConnectFour($b) => $e,
            Board::Reversi($b) => $e,
            Board::Snake($b) => $e,
            Board::Sudoku($b) => $e,
            Board::Twenty48($b) => $e,
            Board::Hanoi($b) => $e,
            Board::Maze($b) => $e,
            Board::Holdem($b) => $e,
        }
    };
}

/// Full environment state. Cloning is cheap enough for search.
#[derive(Clone, Debug)]
pub struct GameState {
    descriptor: GameDescriptor,
    board: Board,
    rng: ArenaRng,
    step_index: u64,
    terminal: bool,
    scores: Vec<f64>,
    success: Option<bool>,
    end: Option<EndReason>,
}

impl GameState {
    /// The initial state for `(descriptor, seed)`. Deterministic.
    pub fn new(descriptor: &GameDescriptor, seed: u64) -> Result<GameState, EngineError> {
        // Re-validate: descriptors can be built by hand.
        let descriptor = GameDescriptor::new(descriptor.config)?;
        let mut rng = seed::rng(seed::derive(seed, seed::tag_of("play")));
        let board = match descriptor.config {
            GameConfig::TicTacToe => Board::TicTacToe(tictactoe::TicTacToe::new()),
            GameConfig::ConnectFour => Board::ConnectFour(connect4::ConnectFour::new()),
            GameConfig::Reversi => Board::Reversi(reversi::Reversi::new()),
            GameConfig::Snake { size } => Board::Snake(snake::Snake::new(size as usize, &mut rng)),
            GameConfig::Sudoku { clues } => {
                let grid = sudoku::generate(seed, clues).map_err(EngineError::Generator)?;
                Board::Sudoku(sudoku::Sudoku::new(grid))
            }
            GameConfig::Twenty48 => Board::Twenty48(twenty48::Twenty48::new(&mut rng)),
            GameConfig::Hanoi { disks } => Board::Hanoi(hanoi::Hanoi::new(disks as usize)),
            GameConfig::Maze {
                width,
                height,
                visibility,
            } => {
                let grid = maze::generate(width as usize, height as usize, seed)?;
                Board::Maze(maze::Maze::new(grid, visibility))
            }
            GameConfig::Holdem {
                seats,
                starting_stack,
                small_bet,
                hands,
            } => Board::Holdem(holdem::Holdem::new(
                seats as usize,
                starting_stack,
                small_bet,
                hands,
                &mut rng,
            )),
        };
        Ok(Self::from_board(descriptor, board, rng))
    }

    pub(crate) fn from_board(descriptor: GameDescriptor, board: Board, rng: ArenaRng) -> GameState {
        let seats = descriptor.seats;
        let mut state = GameState {
            descriptor,
            board,
            rng,
            step_index: 0,
            terminal: false,
            scores: vec![0.0; seats],
            success: None,
            end: None,
        };
        state.settle();
        state
    }

    pub fn descriptor(&self) -> &GameDescriptor {
        &self.descriptor
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// Per-seat rewards; fully populated once terminal.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// For single-player games, whether the puzzle was solved.
    pub fn success(&self) -> Option<bool> {
        self.success
    }

    pub fn end_reason(&self) -> Option<EndReason> {
        self.end
    }

    pub fn to_act(&self) -> Option<usize> {
        if self.terminal {
            None
        } else {
            Some(dispatch!(&self.board, b => b.to_act()))
        }
    }

    fn check_seat(&self, seat: usize) -> Result<(), EngineError> {
        if seat >= self.descriptor.seats {
            return Err(EngineError::SeatOutOfRange {
                seat,
                seats: self.descriptor.seats,
            });
        }
        Ok(())
    }

    pub fn observe(&self, seat: usize) -> Result<Observation, EngineError> {
        self.check_seat(seat)?;
        Ok(Observation {
            seat,
            to_act: self.to_act(),
            payload: dispatch!(&self.board, b => b.view(seat)),
        })
    }

    /// All false on terminal states and for seats not on move.
    pub fn legal_mask(&self, seat: usize) -> ActionMask {
        let mut mask = ActionMask::none(self.descriptor.action_space);
        if self.to_act() == Some(seat) {
            dispatch!(&self.board, b => b.fill_mask(seat, mask.bits_mut()));
        }
        mask
    }

    pub fn apply(&mut self, seat: usize, action: usize) -> Result<(), EngineError> {
        self.check_seat(seat)?;
        if !self.legal_mask(seat).is_legal(action) {
            return Err(EngineError::RuleViolation { seat, action });
        }
        let rng = &mut self.rng;
        dispatch!(&mut self.board, b => b.play(seat, action, rng));
        self.step_index += 1;
        self.settle();
        Ok(())
    }

    /// Functional form of [`GameState::apply`].
    pub fn applied(&self, seat: usize, action: usize) -> Result<GameState, EngineError> {
        let mut next = self.clone();
        next.apply(seat, action)?;
        Ok(next)
    }

    /// Scores charged when `offender` forfeits at this point.
    pub fn forfeit_scores(&self, offender: usize) -> Vec<f64> {
        if let Some(s) = dispatch!(&self.board, b => b.forfeit_scores(offender)) {
            return s;
        }
        match self.descriptor.seats {
            1 => dispatch!(&self.board, b => b.cut_off()).scores,
            n => (0..n)
                .map(|s| if s == offender { -1.0 } else { 1.0 })
                .collect(),
        }
    }

    fn settle(&mut self) {
        if self.terminal {
            return;
        }
        if let Some(fin) = dispatch!(&self.board, b => b.finish()) {
            self.finish(fin, EndReason::Natural);
            return;
        }
        if self.step_index >= self.descriptor.step_cap {
            let fin = dispatch!(&self.board, b => b.cut_off());
            self.finish(fin, EndReason::StepCap);
            return;
        }
        let seat = dispatch!(&self.board, b => b.to_act());
        if self.legal_mask(seat).is_all_false() {
            let fin = dispatch!(&self.board, b => b.cut_off());
            self.finish(fin, EndReason::Stuck);
        }
    }

    fn finish(&mut self, fin: Finish, reason: EndReason) {
        self.terminal = true;
        self.scores = fin.scores;
        self.success = fin.success;
        self.end = Some(reason);
    }

    #[cfg(test)]
    pub(crate) fn board(&self) -> &Board {
        &self.board
    }
}

/// Free-function forms taking the descriptor alongside the state.
pub fn reset(descriptor: &GameDescriptor, seed: u64) -> Result<GameState, EngineError> {
    GameState::new(descriptor, seed)
}

pub fn observe(
    state: &GameState,
    descriptor: &GameDescriptor,
    seat: usize,
) -> Result<Observation, EngineError> {
    if seat >= descriptor.seats {
        return Err(EngineError::SeatOutOfRange {
            seat,
            seats: descriptor.seats,
        });
    }
    state.observe(seat)
}

pub fn legal_mask(state: &GameState, _descriptor: &GameDescriptor, seat: usize) -> ActionMask {
    state.legal_mask(seat)
}

pub fn apply(
    state: &GameState,
    _descriptor: &GameDescriptor,
    seat: usize,
    action: usize,
) -> Result<GameState, EngineError> {
    state.applied(seat, action)
}
