use alloc::string::String;

use super::random::{match_rng, pick_uniform};
use super::{Agent, Decision, DecisionOutcome, DecisionRequest, MatchContext};
use crate::engine::{FailureKind, Payload};
use crate::games::{connect4::ConnectFour, tictactoe};
use crate::seed::{self, ArenaRng};

/// Plays an immediately winning move, else blocks the opponent's immediate
/// win, else moves at random. The win/block rule applies to Tic-Tac-Toe and
/// Connect Four; other games fall through to the random choice.
#[derive(Debug, Clone)]
pub struct GreedyAgent {
    id: String,
    seed: u64,
    rng: ArenaRng,
}

impl GreedyAgent {
    pub fn new(id: impl Into<String>, seed: u64) -> Self {
        GreedyAgent {
            id: id.into(),
            seed,
            rng: seed::rng(seed),
        }
    }
}

fn tictactoe_tactic(cells: &[u8], me: usize) -> Option<usize> {
    let mut board = [0u8; 9];
    board.copy_from_slice(&cells[..9]);
    for who in [me, 1 - me] {
        for a in (0..9).filter(|&a| board[a] == 0) {
            let mut b = board;
            b[a] = who as u8 + 1;
            if tictactoe::winner(&b) == Some(who) {
                return Some(a);
            }
        }
    }
    None
}

fn connect4_tactic(cells: &[u8]) -> Option<usize> {
    let pos = ConnectFour::from_cells(cells);
    let me = pos.to_move();
    let win_for = |who: usize| {
        (0..7).find(|&c| {
            if !pos.can_play(c) {
                return false;
            }
            let mut p = ConnectFour::from_cells(cells);
            if who != me {
                // Let the opponent move as if it were its turn.
                p = ConnectFour::with_to_move(p, who);
            }
            p.drop_piece(c);
            p.winner() == Some(who)
        })
    };
    win_for(me).or_else(|| win_for(1 - me))
}

impl Agent for GreedyAgent {
    fn id(&self) -> &str {
        &self.id
    }

    fn begin_match(&mut self, ctx: &MatchContext<'_>) -> Result<(), FailureKind> {
        self.rng = match_rng(self.seed, ctx);
        Ok(())
    }

    fn decide(&mut self, request: &DecisionRequest<'_>) -> DecisionOutcome {
        let obs = request.observation;
        let tactic = match &obs.payload {
            Payload::TicTacToe(v) => tictactoe_tactic(&v.cells, obs.seat),
            Payload::ConnectFour(v) => connect4_tactic(&v.cells),
            _ => None,
        }
        .filter(|&a| request.mask.is_legal(a));
        // Draw anyway so the random stream does not depend on the board.
        let fallback = pick_uniform(request.mask, &mut self.rng);
        DecisionOutcome::unmetered(match tactic.or(fallback) {
            Some(a) => Decision::Action(a),
            None => Decision::NoAction,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tictactoe_wins_then_blocks() {
        // X (seat 0) at 0,1; O at 3,4: X wins at 2.
        assert_eq!(tictactoe_tactic(&[1, 1, 0, 2, 2, 0, 0, 0, 0], 0), Some(2));
        // O to move must block 2 only when it cannot win; here it wins at 5.
        assert_eq!(tictactoe_tactic(&[1, 1, 0, 2, 2, 0, 1, 0, 0], 1), Some(5));
        assert_eq!(tictactoe_tactic(&[1, 1, 0, 2, 0, 0, 0, 0, 0], 1), Some(2));
    }

    #[test]
    fn connect4_blocks_vertical_threat() {
        let mut p = ConnectFour::new();
        for c in [0, 6, 0, 6, 0] {
            p.drop_piece(c);
        }
        // Seat 1 to move; seat 0 threatens column 0. Seat 1 also has two in
        // column 6 only, so it must block.
        assert_eq!(connect4_tactic(p.cells()), Some(0));
    }
}
