use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::engine::{GameDescriptor, GameId, InfoKind};

/// The line protocol every agent process speaks, as handed to coders.
pub const PROTOCOL_TEXT: &str = "\
The harness talks to your program over stdin/stdout, one JSON object per line (UTF-8, newline-terminated). \
Flush stdout after every line. Write diagnostics to stderr only.

harness -> agent: {\"type\":\"hello\",\"protocol\":1,\"game\":\"<game_id>\",\"seat\":<int>,\"config\":{...}}
agent -> harness: {\"type\":\"ready\",\"name\":\"<string>\"}
harness -> agent: {\"type\":\"act\",\"match\":\"<id>\",\"step\":<int>,\"observation\":{...},\"action_mask\":[<bool>,...],\"deadline_ms\":<int>}
agent -> harness: {\"type\":\"action\",\"step\":<same step>,\"action\":<int>}
harness -> agent: {\"type\":\"result\",\"scores\":[<number>,...]} when a match ends
harness -> agent: {\"type\":\"bye\"} before shutdown; exit promptly.

A hello starts every match, so one process may play several matches in a row. Echo the step number of the act \
message. Reply with action -1 when no true bit exists in action_mask. Any other line, a wrong step echo, a \
non-integer action or an action outside the action space is a protocol error and forfeits the match, as does \
missing the deadline or choosing an action whose mask bit is false.";

/// A rendered generation prompt in four parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub game: GameId,
    pub task_framing: String,
    pub environment_spec: String,
    pub structure_constraints: String,
    pub strategic_guidance: String,
    pub rendered: String,
}

fn guidance(game: GameId) -> &'static str {
    match game {
        GameId::TicTacToe => "The game is solved: with perfect play it is a draw. A full minimax search is cheap.",
        GameId::ConnectFour => {
            "Prefer central columns. Win immediately when possible and block the opponent's immediate wins. \
             A depth-limited alpha-beta search with a line-counting evaluation is strong."
        }
        GameId::Reversi => {
            "Corners cannot be flipped back; squares next to an empty corner are risky. Limiting the \
             opponent's mobility usually pays off more than maximising discs early."
        }
        GameId::Snake => {
            "Both snakes move at the same time. Never step into a wall or a body, avoid cells the opponent's \
             head can reach when you are not longer, and head for the food when it is safe."
        }
        GameId::Sudoku => {
            "The puzzle has exactly one solution. Solving it internally (for example by backtracking) and \
             then placing digits one cell at a time is a valid approach."
        }
        GameId::Twenty48 => {
            "Keep the largest tile in a corner and avoid moves that scatter large tiles. Look ahead over \
             possible spawns when time allows."
        }
        GameId::Hanoi => "The optimal solution needs 2^n - 1 moves. Fewer steps rank higher among solvers.",
        GameId::Maze => {
            "Breadth-first search finds the shortest route when the whole grid is visible. With limited \
             visibility, remember explored cells and move toward the nearest unexplored frontier."
        }
        GameId::Holdem => {
            "Limit betting: each raise is a fixed size and at most 4 raises happen per street. Play tighter \
             with weak hole cards and value-bet strong made hands. Ranking is by chips at the end."
        }
    }
}

fn info_text(kind: InfoKind) -> &'static str {
    match kind {
        InfoKind::Perfect => "perfect information",
        InfoKind::Imperfect => "imperfect information (parts of the state are hidden from you)",
        InfoKind::PerfectRandom => "perfect information with random events",
    }
}

/// Instantiates the generation prompt for a game. Deterministic.
pub fn build_prompt(descriptor: &GameDescriptor) -> PromptBundle {
    let game = descriptor.game_id;
    let seats = if descriptor.seats == 1 {
        String::from("a single-player puzzle")
    } else {
        format!("a {}-seat game", descriptor.seats)
    };
    let task_framing = format!(
        "Write a complete, self-contained program that plays {game} ({seats}) as well as possible. \
         Your agent will be validated by automated tests and then entered into a tournament against \
         other agents; it is ranked by a conservative skill estimate, so consistency matters as much \
         as strength. Invalid, slow or crashing agents forfeit their matches."
    );
    let config = config_summary(descriptor);
    let environment_spec = format!(
        "Game: {game}\nInformation: {info}\nSeats: {seats_n}\nConfiguration: {config}\n\
         Action space: {space} integer actions.\n\nObservation schema:\n{schema}\n\n\
         Action encoding:\n{encoding}\n\n\
         Action mask: action_mask has exactly {space} booleans; action a is legal iff action_mask[a] is true. \
         Choose only legal actions. The mask is all false only when no move is possible.",
        info = info_text(descriptor.info_kind),
        seats_n = descriptor.seats,
        space = descriptor.action_space,
        schema = descriptor.observation_schema,
        encoding = descriptor.action_encoding,
    );
    let structure_constraints = format!(
        "Implement a class with this interface:\n\n\
         class Agent:\n    def __init__(self, name: str): ...\n    \
         def select_action(self, observation: dict, action_mask: list[bool]) -> int | None: ...\n\n\
         select_action returns a legal action index, or None when the mask has no true bit. \
         Use only the standard library. Do not read or write files outside the working directory and do \
         not open network connections. Every decision must finish well within the deadline.\n\n\
         Wire protocol (handled for you by the runner when you use the class interface):\n{PROTOCOL_TEXT}"
    );
    let strategic_guidance = String::from(guidance(game));
    let rendered = format!(
        "## Task\n{task_framing}\n\n## Environment\n{environment_spec}\n\n\
         ## Required structure\n{structure_constraints}\n\n## Strategy notes\n{strategic_guidance}\n\n\
         Reply with the full program in one fenced code block."
    );
    PromptBundle {
        game,
        task_framing,
        environment_spec,
        structure_constraints,
        strategic_guidance,
        rendered,
    }
}

/// Compact `key=value` listing of the config parameters.
fn config_summary(descriptor: &GameDescriptor) -> String {
    use crate::engine::GameConfig::*;
    match descriptor.config {
        TicTacToe | ConnectFour | Reversi | Twenty48 => String::from("standard"),
        Snake { size } => format!("size={size}"),
        Sudoku { clues } => format!("clues={clues}"),
        Hanoi { disks } => format!("disks={disks}"),
        Maze {
            width,
            height,
            visibility,
        } => format!("width={width} height={height} visibility={visibility:?}"),
        Holdem {
            seats,
            starting_stack,
            small_bet,
            hands,
        } => format!(
            "seats={seats} starting_stack={starting_stack} small_bet={small_bet} big_bet={} hands={hands}",
            2 * small_bet
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games;

    #[test]
    fn sections_are_filled_and_stable() {
        for g in GameId::ALL {
            let d = g.default_config().descriptor().unwrap();
            let p = build_prompt(&d);
            for s in [
                &p.task_framing,
                &p.environment_spec,
                &p.structure_constraints,
                &p.strategic_guidance,
            ] {
                assert!(!s.is_empty());
            }
            assert!(p.environment_spec.contains(d.observation_schema));
            assert!(p.environment_spec.contains(d.action_encoding));
            assert!(p.rendered.contains("select_action"));
            assert!(p.rendered.contains("\"type\":\"act\""));
            assert_eq!(p, build_prompt(&d));
        }
    }

    #[test]
    fn game_specific_content() {
        let ttt = build_prompt(&games::make_tictactoe());
        assert!(ttt.rendered.contains("0 | 1 | 2\n3 | 4 | 5\n6 | 7 | 8"));
        let holdem = build_prompt(&games::make_holdem(3, 100, 2).unwrap());
        assert!(holdem.rendered.contains("0..51"));
        assert!(holdem.rendered.contains("big_bet=4"));
    }
}
