use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::descriptor::GameDescriptor;
use super::record::{FailureKind, MatchRecord, Outcome, ResourceLimits, StepRecord};
use super::state::{EngineError, GameState};
use crate::agents::{Agent, Decision, DecisionRequest, MatchContext};
use crate::clock::Clock;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("{agents} agents supplied for a {seats}-seat game")]
    SeatCount { agents: usize, seats: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Drives one match to completion. Agent misbehaviour never surfaces as an
/// error: it ends the match as a forfeit recorded in the transcript.
pub fn run_match(
    descriptor: &GameDescriptor,
    agents: &mut [&mut dyn Agent],
    limits: &ResourceLimits,
    seed: u64,
    match_id: &str,
    clock: &dyn Clock,
) -> Result<MatchRecord, RunError> {
    if agents.len() != descriptor.seats {
        return Err(RunError::SeatCount {
            agents: agents.len(),
            seats: descriptor.seats,
        });
    }
    let start = clock.now();
    let mut state = GameState::new(descriptor, seed)?;
    let ids: Vec<String> = agents.iter().map(|a| a.id().to_string()).collect();
    let mut steps = Vec::new();
    let wall_cap = limits.match_wall_cap(descriptor.step_cap);

    let mut forfeit: Option<(usize, FailureKind)> = None;
    for (seat, agent) in agents.iter_mut().enumerate() {
        let ctx = MatchContext {
            match_id,
            config: &descriptor.config,
            seat,
            seed,
        };
        if let Err(kind) = agent.begin_match(&ctx) {
            forfeit = Some((seat, kind));
            break;
        }
    }

    while forfeit.is_none() && !state.is_terminal() {
        let seat = state
            .to_act()
            .expect("non-terminal state has a seat to act");
        let mask = state.legal_mask(seat);
        let observation = state.observe(seat)?;
        let remaining = wall_cap - (clock.now() - start);
        if remaining <= 0.0 {
            forfeit = Some((seat, FailureKind::Timeout));
            break;
        }
        let request = DecisionRequest {
            match_id,
            step: state.step_index(),
            observation: &observation,
            mask: &mask,
            deadline_seconds: limits.move_timeout_seconds.min(remaining),
        };
        let out = agents[seat].decide(&request);
        let latency = out.latency_seconds.max(0.0);
        let (action, error) = match out.decision {
            Decision::Action(a) if a >= descriptor.action_space => {
                (Some(a), Some(FailureKind::ProtocolError))
            }
            Decision::Action(a) if !mask.is_legal(a) => (Some(a), Some(FailureKind::IllegalAction)),
            Decision::Action(a) => (Some(a), None),
            Decision::NoAction => (None, Some(FailureKind::IllegalAction)),
            Decision::Failed(kind) => (None, Some(kind)),
        };
        steps.push(StepRecord {
            seat,
            action,
            latency_seconds: latency,
            error,
        });
        match (action, error) {
            (_, Some(kind)) => forfeit = Some((seat, kind)),
            (Some(a), None) => state.apply(seat, a)?,
            (None, None) => unreachable!(),
        }
    }

    let (outcome, scores) = match forfeit {
        Some((seat, cause)) => (Outcome::Forfeit { seat, cause }, state.forfeit_scores(seat)),
        None => (natural_outcome(&state), state.scores().to_vec()),
    };
    for agent in agents.iter_mut() {
        agent.end_match(&scores);
    }
    Ok(MatchRecord {
        match_id: match_id.to_string(),
        game_id: descriptor.game_id,
        config: descriptor.config,
        agents: ids,
        seed,
        steps,
        outcome,
        scores,
        wall_time: (clock.now() - start).max(0.0),
        withdrawn: false,
    })
}

fn natural_outcome(state: &GameState) -> Outcome {
    let scores = state.scores();
    if state.descriptor().seats == 1 {
        return if state.success() == Some(true) {
            Outcome::Winner { seat: 0 }
        } else {
            Outcome::Failed
        };
    }
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut top = scores.iter().enumerate().filter(|(_, s)| **s == best);
    match (top.next(), top.next()) {
        (Some((seat, _)), None) => Outcome::Winner { seat },
        _ => Outcome::Draw,
    }
}
