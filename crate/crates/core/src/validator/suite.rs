use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::agents::random::{pick_uniform, RandomAgent};
use crate::agents::{Agent, Decision, DecisionRequest, MatchContext};
use crate::clock::Clock;
use crate::engine::{
    run_match, ActionMask, GameConfig, GameDescriptor, GameId, GameState, Outcome, ResourceLimits,
};
use crate::seed::{derive, rng, tag_of};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Structure,
    Function,
    Logic,
    Robustness,
}

impl Layer {
    pub const ALL: [Layer; 4] = [
        Layer::Structure,
        Layer::Function,
        Layer::Logic,
        Layer::Robustness,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            Layer::Structure => "structure",
            Layer::Function => "function",
            Layer::Logic => "logic",
            Layer::Robustness => "robustness",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A scripted interaction. States are reached by a seeded random walk of
/// `plies` legal moves from the initial state of the case's config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Procedure {
    /// The agent accepts a match start for `seat`.
    Handshake { seat: usize },
    /// One request on the initial state; any in-range action (or the
    /// no-action sentinel) conforms.
    InterfaceProbe { seed: u64 },
    /// The reply must be a legal action.
    LegalReply { seed: u64, plies: u32 },
    /// The mask is narrowed to a single legal action, which must be chosen.
    ForcedChoice { seed: u64, plies: u32 },
    /// A whole match against random opponents without forfeiting.
    FullMatch {
        config: GameConfig,
        seat: usize,
        seed: u64,
    },
    /// A single-player episode that must end in success.
    Solve { config: GameConfig, seed: u64 },
    /// All-false mask on a live state: the agent must decline, then keep
    /// answering.
    EmptyMask { seed: u64, plies: u32 },
    /// A finished game with an all-false mask: decline, then keep answering.
    TerminalState { seed: u64 },
    /// Many consecutive requests within one match.
    Burst { seed: u64, requests: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub layer: Layer,
    pub game: GameId,
    pub config: GameConfig,
    pub procedure: Procedure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    Fail,
    NotRun,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub layer: Layer,
    pub status: CaseStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub layer: Layer,
    pub passed: usize,
    pub total: usize,
    /// Unweighted fraction of the layer's cases that passed.
    pub pass_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub agent: String,
    pub game: GameId,
    pub cases: Vec<CaseResult>,
    pub layers: Vec<LayerSummary>,
    pub passed: bool,
    /// The error set: one line per failing or skipped case, led by its id.
    pub errors: Vec<String>,
    pub elapsed_seconds: f64,
}

impl TestReport {
    pub fn failing_cases(&self) -> impl Iterator<Item = &str> {
        self.cases
            .iter()
            .filter(|c| c.status != CaseStatus::Pass)
            .map(|c| c.id.as_str())
    }

    pub fn layer(&self, layer: Layer) -> Option<&LayerSummary> {
        self.layers.iter().find(|l| l.layer == layer)
    }

    pub fn executed(&self, layer: Layer) -> usize {
        self.cases
            .iter()
            .filter(|c| c.layer == layer && c.status != CaseStatus::NotRun)
            .count()
    }
}

fn plies_for(game: GameId) -> u32 {
    match game {
        GameId::TicTacToe | GameId::Hanoi => 3,
        GameId::ConnectFour => 8,
        GameId::Reversi => 12,
        GameId::Snake | GameId::Maze => 6,
        GameId::Sudoku | GameId::Holdem => 5,
        GameId::Twenty48 => 10,
    }
}

/// Small instances the logic layer expects a competent agent to solve.
fn solvable(config: &GameConfig) -> Option<GameConfig> {
    Some(match *config {
        GameConfig::Hanoi { .. } => GameConfig::Hanoi { disks: 3 },
        GameConfig::Maze { visibility, .. } => GameConfig::Maze {
            width: 7,
            height: 7,
            visibility,
        },
        GameConfig::Sudoku { .. } => GameConfig::Sudoku { clues: 40 },
        _ => return None,
    })
}

/// The standard suite for a game: at least two cases per layer, ids of the
/// form `<game>.<layer>.<name>`.
pub fn suite_for(descriptor: &GameDescriptor) -> Vec<TestCase> {
    let game = descriptor.game_id;
    let config = descriptor.config;
    let base = tag_of(game.as_str());
    let plies = plies_for(game);
    let last = descriptor.seats - 1;
    let mut cases = Vec::new();
    let mut push = |layer: Layer, name: &str, procedure: Procedure| {
        cases.push(TestCase {
            id: format!("{game}.{layer}.{name}"),
            layer,
            game,
            config,
            procedure,
        });
    };

    push(
        Layer::Structure,
        "handshake",
        Procedure::Handshake { seat: 0 },
    );
    push(
        Layer::Structure,
        "interface",
        Procedure::InterfaceProbe { seed: base },
    );
    if last > 0 {
        push(
            Layer::Structure,
            "handshake_last_seat",
            Procedure::Handshake { seat: last },
        );
    }

    push(
        Layer::Function,
        "legal_initial",
        Procedure::LegalReply {
            seed: base,
            plies: 0,
        },
    );
    push(
        Layer::Function,
        "legal_midgame",
        Procedure::LegalReply {
            seed: derive(base, 1),
            plies,
        },
    );
    push(
        Layer::Function,
        "forced_choice",
        Procedure::ForcedChoice {
            seed: derive(base, 2),
            plies,
        },
    );

    let seed = derive(base, 3);
    match game {
        GameId::Holdem => {
            push(
                Layer::Logic,
                "full_match_seat0",
                Procedure::FullMatch {
                    config,
                    seat: 0,
                    seed,
                },
            );
            push(
                Layer::Logic,
                "full_match_seat1",
                Procedure::FullMatch {
                    config,
                    seat: 1,
                    seed,
                },
            );
            // Stack 3 with blinds 1/2: the button cannot raise and must be
            // offered all-in.
            let short = GameConfig::Holdem {
                seats: 2,
                starting_stack: 3,
                small_bet: 2,
                hands: 5,
            };
            push(
                Layer::Logic,
                "all_in",
                Procedure::FullMatch {
                    config: short,
                    seat: 0,
                    seed,
                },
            );
        }
        _ if descriptor.seats == 2 => {
            push(
                Layer::Logic,
                "full_match_seat0",
                Procedure::FullMatch {
                    config,
                    seat: 0,
                    seed,
                },
            );
            push(
                Layer::Logic,
                "full_match_seat1",
                Procedure::FullMatch {
                    config,
                    seat: 1,
                    seed,
                },
            );
        }
        _ => {
            push(
                Layer::Logic,
                "episode",
                Procedure::FullMatch {
                    config,
                    seat: 0,
                    seed,
                },
            );
            match solvable(&config) {
                Some(small) => push(
                    Layer::Logic,
                    "solve_small",
                    Procedure::Solve {
                        config: small,
                        seed,
                    },
                ),
                None => push(
                    Layer::Logic,
                    "episode_second_seed",
                    Procedure::FullMatch {
                        config,
                        seat: 0,
                        seed: derive(seed, 1),
                    },
                ),
            }
        }
    }

    push(
        Layer::Robustness,
        "empty_mask",
        Procedure::EmptyMask {
            seed: derive(base, 4),
            plies,
        },
    );
    push(
        Layer::Robustness,
        "terminal_state",
        Procedure::TerminalState {
            seed: derive(base, 5),
        },
    );
    push(
        Layer::Robustness,
        "burst",
        Procedure::Burst {
            seed: derive(base, 6),
            requests: 30,
        },
    );
    cases
}

/// Runs the suite layer by layer. A failure in the structure layer marks all
/// remaining cases as not run.
pub fn run_test_suite(
    agent: &mut dyn Agent,
    suite: &[TestCase],
    limits: &ResourceLimits,
    clock: &dyn Clock,
) -> TestReport {
    let start = clock.now();
    let game = suite.first().map_or(GameId::TicTacToe, |c| c.game);
    let mut ordered: Vec<&TestCase> = suite.iter().collect();
    ordered.sort_by_key(|c| c.layer);

    let mut cases = Vec::with_capacity(ordered.len());
    let mut gated = false;
    for layer in Layer::ALL {
        let mut layer_failed = false;
        for case in ordered.iter().filter(|c| c.layer == layer) {
            let (status, detail) = if gated {
                (
                    CaseStatus::NotRun,
                    Some(String::from("not run: structure layer failed")),
                )
            } else {
                match run_case(agent, case, limits, clock) {
                    Ok(()) => (CaseStatus::Pass, None),
                    Err(e) => {
                        layer_failed = true;
                        (CaseStatus::Fail, Some(e))
                    }
                }
            };
            cases.push(CaseResult {
                id: case.id.clone(),
                layer,
                status,
                detail,
            });
        }
        if layer == Layer::Structure && layer_failed {
            gated = true;
        }
    }

    let layers = summarize(&cases);
    let errors: Vec<String> = cases
        .iter()
        .filter(|c| c.status != CaseStatus::Pass)
        .map(|c| format!("{}: {}", c.id, c.detail.as_deref().unwrap_or("failed")))
        .collect();
    TestReport {
        agent: agent.id().to_string(),
        game,
        passed: !cases.is_empty() && errors.is_empty(),
        cases,
        layers,
        errors,
        elapsed_seconds: (clock.now() - start).max(0.0),
    }
}

pub(crate) fn summarize(cases: &[CaseResult]) -> Vec<LayerSummary> {
    Layer::ALL
        .into_iter()
        .filter_map(|layer| {
            let total = cases.iter().filter(|c| c.layer == layer).count();
            let passed = cases
                .iter()
                .filter(|c| c.layer == layer && c.status == CaseStatus::Pass)
                .count();
            (total > 0).then(|| LayerSummary {
                layer,
                passed,
                total,
                pass_rate: passed as f64 / total as f64,
            })
        })
        .collect()
}

/// A seeded random walk of at most `plies` moves that stops short of any
/// terminal state. `None` walks to the end of the game.
fn walk(desc: &GameDescriptor, seed: u64, plies: Option<u32>) -> Result<GameState, String> {
    let mut state = GameState::new(desc, seed).map_err(|e| e.to_string())?;
    let mut r = rng(derive(seed, tag_of("walk")));
    let mut n = 0;
    while let Some(seat) = state.to_act() {
        if plies.is_some_and(|p| n >= p) {
            break;
        }
        let mask = state.legal_mask(seat);
        let Some(a) = pick_uniform(&mask, &mut r) else {
            break;
        };
        let next = state.applied(seat, a).map_err(|e| e.to_string())?;
        if next.is_terminal() && plies.is_some() {
            break;
        }
        state = next;
        n += 1;
    }
    Ok(state)
}

struct Session<'a> {
    agent: &'a mut dyn Agent,
    case: &'a TestCase,
    desc: GameDescriptor,
    limits: &'a ResourceLimits,
    step: u64,
}

impl<'a> Session<'a> {
    fn open(
        agent: &'a mut dyn Agent,
        case: &'a TestCase,
        seat: usize,
        seed: u64,
        limits: &'a ResourceLimits,
    ) -> Result<Self, String> {
        let desc = case.config.descriptor().map_err(|e| e.to_string())?;
        let ctx = MatchContext {
            match_id: &case.id,
            config: &case.config,
            seat,
            seed,
        };
        agent
            .begin_match(&ctx)
            .map_err(|k| format!("handshake {k}"))?;
        Ok(Session {
            agent,
            case,
            desc,
            limits,
            step: 0,
        })
    }

    /// One decision. `Ok(None)` is the no-action sentinel.
    fn ask(
        &mut self,
        state: &GameState,
        seat: usize,
        mask: &ActionMask,
    ) -> Result<Option<usize>, String> {
        let observation = state.observe(seat).map_err(|e| e.to_string())?;
        let request = DecisionRequest {
            match_id: &self.case.id,
            step: self.step,
            observation: &observation,
            mask,
            deadline_seconds: self.limits.move_timeout_seconds,
        };
        self.step += 1;
        match self.agent.decide(&request).decision {
            Decision::Action(a) if a >= self.desc.action_space => Err(format!(
                "protocol_error: action {a} outside 0..{}",
                self.desc.action_space
            )),
            Decision::Action(a) => Ok(Some(a)),
            Decision::NoAction => Ok(None),
            Decision::Failed(kind) => Err(kind.to_string()),
        }
    }

    fn ask_legal(
        &mut self,
        state: &GameState,
        seat: usize,
        mask: &ActionMask,
    ) -> Result<usize, String> {
        match self.ask(state, seat, mask)? {
            Some(a) if mask.is_legal(a) => Ok(a),
            Some(a) => Err(format!(
                "illegal_action: chose {a}, legal {:?}",
                mask.legal_actions().collect::<Vec<_>>()
            )),
            None => Err(String::from(
                "illegal_action: declined to act with legal moves available",
            )),
        }
    }

    fn close(self) {
        self.agent.end_match(&[]);
    }
}

fn run_case(
    agent: &mut dyn Agent,
    case: &TestCase,
    limits: &ResourceLimits,
    clock: &dyn Clock,
) -> Result<(), String> {
    let desc = case.config.descriptor().map_err(|e| e.to_string())?;
    // Runs `f` inside a match context and always closes it.
    fn scripted(
        agent: &mut dyn Agent,
        case: &TestCase,
        seat: usize,
        seed: u64,
        limits: &ResourceLimits,
        f: impl FnOnce(&mut Session<'_>) -> Result<(), String>,
    ) -> Result<(), String> {
        let mut s = Session::open(agent, case, seat, seed, limits)?;
        let r = f(&mut s);
        s.close();
        r
    }

    match case.procedure {
        Procedure::Handshake { seat } => scripted(agent, case, seat, 0, limits, |_| Ok(())),
        Procedure::InterfaceProbe { seed } => {
            let state = walk(&desc, seed, Some(0))?;
            let seat = state.to_act().unwrap_or(0);
            scripted(agent, case, seat, seed, limits, |s| {
                s.ask(&state, seat, &state.legal_mask(seat)).map(|_| ())
            })
        }
        Procedure::LegalReply { seed, plies } => {
            let state = walk(&desc, seed, Some(plies))?;
            let seat = state.to_act().ok_or("walk ended in a terminal state")?;
            scripted(agent, case, seat, seed, limits, |s| {
                s.ask_legal(&state, seat, &state.legal_mask(seat))
                    .map(|_| ())
            })
        }
        Procedure::ForcedChoice { seed, plies } => {
            let state = walk(&desc, seed, Some(plies))?;
            let seat = state.to_act().ok_or("walk ended in a terminal state")?;
            let full = state.legal_mask(seat);
            let mut r = rng(derive(seed, tag_of("forced")));
            let only = pick_uniform(&full, &mut r).ok_or("no legal action to force")?;
            let mask = full.only(only);
            scripted(agent, case, seat, seed, limits, |s| {
                match s.ask(&state, seat, &mask)? {
                    Some(a) if a == only => Ok(()),
                    Some(a) => Err(format!(
                        "illegal_action: chose {a}, mask allows only {only}"
                    )),
                    None => Err(format!("declined to act, mask allows only {only}")),
                }
            })
        }
        Procedure::FullMatch { config, seat, seed } => {
            play_out(agent, case, &config, seat, seed, false, limits, clock)
        }
        Procedure::Solve { config, seed } => {
            play_out(agent, case, &config, 0, seed, true, limits, clock)
        }
        Procedure::EmptyMask { seed, plies } => {
            let state = walk(&desc, seed, Some(plies))?;
            let seat = state.to_act().ok_or("walk ended in a terminal state")?;
            scripted(agent, case, seat, seed, limits, |s| {
                match s.ask(&state, seat, &ActionMask::none(desc.action_space))? {
                    None => {}
                    Some(a) => {
                        return Err(format!(
                            "chose {a} with an all-false mask instead of declining"
                        ))
                    }
                }
                s.ask_legal(&state, seat, &state.legal_mask(seat))
                    .map(|_| ())
                    .map_err(|e| format!("after an empty mask: {e}"))
            })
        }
        Procedure::TerminalState { seed } => {
            let end = walk(&desc, seed, None)?;
            let start = walk(&desc, seed, Some(0))?;
            let seat = start.to_act().unwrap_or(0);
            scripted(agent, case, seat, seed, limits, |s| {
                match s.ask(&end, seat, &end.legal_mask(seat))? {
                    None => {}
                    Some(a) => {
                        return Err(format!(
                            "chose {a} in a terminal state instead of declining"
                        ))
                    }
                }
                s.ask_legal(&start, seat, &start.legal_mask(seat))
                    .map(|_| ())
                    .map_err(|e| format!("after a terminal state: {e}"))
            })
        }
        Procedure::Burst { seed, requests } => {
            let states: Vec<GameState> = (0..requests)
                .map(|k| walk(&desc, derive(seed, u64::from(k)), Some(k % 12)))
                .collect::<Result<_, _>>()?;
            let seat = states[0].to_act().unwrap_or(0);
            scripted(agent, case, seat, seed, limits, |s| {
                for (k, state) in states.iter().enumerate() {
                    let Some(seat) = state.to_act() else { continue };
                    s.ask_legal(state, seat, &state.legal_mask(seat))
                        .map_err(|e| format!("request {k}: {e}"))?;
                }
                Ok(())
            })
        }
    }
}

/// Plays a whole match with random opponents in the other seats.
#[allow(clippy::too_many_arguments)]
fn play_out(
    agent: &mut dyn Agent,
    case: &TestCase,
    config: &GameConfig,
    seat: usize,
    seed: u64,
    require_success: bool,
    limits: &ResourceLimits,
    clock: &dyn Clock,
) -> Result<(), String> {
    let d = config.descriptor().map_err(|e| e.to_string())?;
    let mut opponents: Vec<RandomAgent> = (0..d.seats - 1)
        .map(|k| RandomAgent::new(format!("random-{k}"), derive(seed, k as u64)))
        .collect();
    let mut rest = opponents.iter_mut();
    let mut mine = Some(agent);
    let mut seats: Vec<&mut dyn Agent> = Vec::with_capacity(d.seats);
    for s in 0..d.seats {
        if s == seat {
            seats.push(mine.take().expect("one candidate seat"));
        } else {
            seats.push(rest.next().expect("enough opponents"));
        }
    }
    let record =
        run_match(&d, &mut seats, limits, seed, &case.id, clock).map_err(|e| e.to_string())?;
    match record.outcome {
        Outcome::Forfeit { seat: f, cause } if f == seat => Err(format!(
            "forfeit ({cause}) at step {}",
            record.steps.len().saturating_sub(1)
        )),
        Outcome::Winner { seat: 0 } => Ok(()),
        _ if require_success => Err(format!(
            "episode ended unsolved after {} steps",
            record.steps.len()
        )),
        _ => Ok(()),
    }
}
