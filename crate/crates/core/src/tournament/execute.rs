use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::schedule::{Schedule, ScheduledMatch};
use crate::agents::Agent;
use crate::clock::Clock;
use crate::engine::{
    run_match, FailureKind, GameId, GameState, MatchRecord, Outcome, ResourceLimits, RunError,
};

/// Consecutive forfeits in one game after which an agent is withdrawn from
/// that game's remaining matches.
pub const WITHDRAWAL_THRESHOLD: u32 = 5;

/// Tracks consecutive forfeits per (game, agent) and turns matches involving
/// withdrawn agents into recorded losses. Records must be committed in
/// schedule order.
#[derive(Clone, Debug, Default)]
pub struct Withdrawals {
    threshold: u32,
    streaks: BTreeMap<(GameId, String), u32>,
    withdrawn: BTreeSet<(GameId, String)>,
}

impl Withdrawals {
    pub fn new(threshold: u32) -> Self {
        Withdrawals {
            threshold,
            ..Default::default()
        }
    }

    pub fn is_withdrawn(&self, game: GameId, agent: &str) -> bool {
        self.withdrawn.contains(&(game, String::from(agent)))
    }

    /// First seat whose agent is withdrawn from this match's game.
    pub fn withdrawn_seat(&self, m: &ScheduledMatch) -> Option<usize> {
        let game = m.config.game_id();
        m.agents.iter().position(|a| self.is_withdrawn(game, a))
    }

    pub fn withdrawn_agents(&self) -> impl Iterator<Item = (GameId, &str)> {
        self.withdrawn.iter().map(|(g, a)| (*g, a.as_str()))
    }

    /// Auto-loss record for a match that will not be played.
    pub fn forfeit_record(m: &ScheduledMatch, seat: usize) -> MatchRecord {
        let scores = m
            .config
            .descriptor()
            .ok()
            .and_then(|d| GameState::new(&d, m.seed).ok())
            .map(|s| s.forfeit_scores(seat))
            .unwrap_or_default();
        MatchRecord {
            match_id: m.match_id.clone(),
            game_id: m.config.game_id(),
            config: m.config,
            agents: m.agents.clone(),
            seed: m.seed,
            steps: Vec::new(),
            outcome: Outcome::Forfeit {
                seat,
                cause: FailureKind::Withdrawn,
            },
            scores,
            wall_time: 0.0,
            withdrawn: true,
        }
    }

    /// Accepts the result of `m`, which may have been computed before an
    /// earlier record withdrew one of its agents; in that case the result is
    /// replaced by an auto-loss. Returns the record to keep.
    pub fn commit(&mut self, m: &ScheduledMatch, played: MatchRecord) -> MatchRecord {
        let record = match self.withdrawn_seat(m) {
            Some(seat) if !played.withdrawn => Self::forfeit_record(m, seat),
            _ => played,
        };
        if record.withdrawn {
            return record;
        }
        let game = record.game_id;
        let forfeiter = record.forfeiter();
        for (seat, agent) in record.agents.iter().enumerate() {
            let key = (game, agent.clone());
            if forfeiter == Some(seat) {
                let streak = self.streaks.entry(key.clone()).or_insert(0);
                *streak += 1;
                if *streak >= self.threshold {
                    self.withdrawn.insert(key);
                }
            } else {
                self.streaks.insert(key, 0);
            }
        }
        record
    }
}

/// Runs a schedule sequentially in order. `registry` maps agent ids to
/// handles; every scheduled id must be present.
pub fn execute(
    schedule: &Schedule,
    registry: &mut BTreeMap<String, Box<dyn Agent + Send>>,
    limits: &ResourceLimits,
    clock: &dyn Clock,
) -> Result<Vec<MatchRecord>, RunError> {
    let mut policy = Withdrawals::new(WITHDRAWAL_THRESHOLD);
    let mut records = Vec::with_capacity(schedule.matches.len());
    for m in &schedule.matches {
        let record = match policy.withdrawn_seat(m) {
            Some(seat) => Withdrawals::forfeit_record(m, seat),
            None => play_one(m, registry, limits, clock)?,
        };
        records.push(policy.commit(m, record));
    }
    Ok(records)
}

fn play_one(
    m: &ScheduledMatch,
    registry: &mut BTreeMap<String, Box<dyn Agent + Send>>,
    limits: &ResourceLimits,
    clock: &dyn Clock,
) -> Result<MatchRecord, RunError> {
    let descriptor = m
        .config
        .descriptor()
        .map_err(|e| RunError::Engine(e.into()))?;
    // Take the handles out so several seats can be borrowed at once.
    let mut taken: Vec<(String, Box<dyn Agent + Send>)> = Vec::with_capacity(m.agents.len());
    for id in &m.agents {
        let agent = registry.remove(id).expect("scheduled agent registered");
        taken.push((id.clone(), agent));
    }
    let result = {
        let mut seats: Vec<&mut dyn Agent> = taken
            .iter_mut()
            .map(|(_, a)| &mut **a as &mut dyn Agent)
            .collect();
        run_match(&descriptor, &mut seats, limits, m.seed, &m.match_id, clock)
    };
    for (id, agent) in taken {
        registry.insert(id, agent);
    }
    result
}
