use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::GameConfig;
use crate::rating::Rating;
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    RoundRobin,
    Swiss,
    Sampled,
    ChallengeSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplayerKind {
    Swiss,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduledMatch {
    pub index: usize,
    pub match_id: String,
    pub config: GameConfig,
    /// Agent id per seat.
    pub agents: Vec<String>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub matches: Vec<ScheduledMatch>,
}

/// A single-player challenge: a game configuration and the instance seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub config: GameConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("need at least {needed} agents, got {got}")]
    TooFewAgents { needed: usize, got: usize },
    #[error("table size {table} is infeasible for {agents} agents and a {seats}-seat game")]
    TableSize {
        table: usize,
        agents: usize,
        seats: usize,
    },
    #[error("agent id `{0}` appears twice")]
    DuplicateAgent(String),
    #[error("the challenge set is empty")]
    NoInstances,
    #[error("game `{0}` does not fit this schedule kind")]
    WrongGame(&'static str),
}

fn check_unique(agents: &[String]) -> Result<(), ScheduleError> {
    for (i, a) in agents.iter().enumerate() {
        if agents[..i].contains(a) {
            return Err(ScheduleError::DuplicateAgent(a.clone()));
        }
    }
    Ok(())
}

fn match_id(config: &GameConfig, index: usize) -> String {
    format!("{}-{:05}", config.game_id(), index)
}

fn finalize(
    kind: ScheduleKind,
    config: GameConfig,
    seed: u64,
    seatings: Vec<Vec<String>>,
) -> Schedule {
    let matches = seatings
        .into_iter()
        .enumerate()
        .map(|(index, agents)| ScheduledMatch {
            index,
            match_id: match_id(&config, index),
            config,
            agents,
            seed: seed::derive(seed, index as u64),
        })
        .collect();
    Schedule { kind, matches }
}

/// Every ordered pair of distinct agents, `rounds_per_pair` times, shuffled
/// by `seed`. Each agent therefore sits in each seat equally often.
pub fn schedule_round_robin(
    agents: &[String],
    config: GameConfig,
    rounds_per_pair: usize,
    seed: u64,
) -> Result<Schedule, ScheduleError> {
    if agents.len() < 2 {
        return Err(ScheduleError::TooFewAgents {
            needed: 2,
            got: agents.len(),
        });
    }
    check_unique(agents)?;
    if config.game_id().is_single_player() {
        return Err(ScheduleError::WrongGame(config.game_id().as_str()));
    }
    let mut seatings = Vec::with_capacity(agents.len() * (agents.len() - 1) * rounds_per_pair);
    for _ in 0..rounds_per_pair {
        for a in agents {
            for b in agents {
                if a != b {
                    seatings.push(alloc::vec![a.clone(), b.clone()]);
                }
            }
        }
    }
    let mut rng = seed::rng(seed::derive(seed, seed::tag_of("round_robin")));
    seatings.shuffle(&mut rng);
    Ok(finalize(ScheduleKind::RoundRobin, config, seed, seatings))
}

/// Plans multi-seat tables wave by wave. A wave seats up to
/// `agents / table_size` tables; every table draws the agents with the
/// fewest appearances so far, which keeps appearance counts within one of
/// each other. Ties are broken at random (`Random`) or by conservative
/// rating (`Swiss`), and Swiss waves group similar ratings at a table with
/// tables ordered from strongest to weakest.
#[derive(Clone, Debug)]
pub struct SwissPlanner {
    agents: Vec<String>,
    config: GameConfig,
    table_size: usize,
    budget: usize,
    kind: MultiplayerKind,
    seed: u64,
    appearances: Vec<usize>,
    planned: usize,
    wave: u64,
}

impl SwissPlanner {
    pub fn new(
        agents: &[String],
        config: GameConfig,
        table_size: usize,
        budget: usize,
        kind: MultiplayerKind,
        seed: u64,
    ) -> Result<Self, ScheduleError> {
        check_unique(agents)?;
        let seats = config.descriptor().map(|d| d.seats).unwrap_or(0);
        if table_size < 2 || table_size > agents.len() || table_size != seats {
            return Err(ScheduleError::TableSize {
                table: table_size,
                agents: agents.len(),
                seats,
            });
        }
        Ok(SwissPlanner {
            agents: agents.to_vec(),
            config,
            table_size,
            budget,
            kind,
            seed,
            appearances: alloc::vec![0; agents.len()],
            planned: 0,
            wave: 0,
        })
    }

    pub fn is_done(&self) -> bool {
        self.planned >= self.budget
    }

    pub fn appearances(&self) -> &[usize] {
        &self.appearances
    }

    /// The next wave of tables. `ratings` is consulted by Swiss planning;
    /// agents without an entry count as rating 0.
    pub fn next_wave(&mut self, ratings: &BTreeMap<String, Rating>) -> Vec<ScheduledMatch> {
        let tables = (self.agents.len() / self.table_size).min(self.budget - self.planned);
        if tables == 0 {
            return Vec::new();
        }
        let mut rng = seed::rng(seed::derive(self.seed, self.wave));
        let strength = |i: usize| {
            ratings
                .get(&self.agents[i])
                .map_or(0.0, Rating::conservative)
        };
        let jitter: Vec<u64> = (0..self.agents.len()).map(|_| rng.gen()).collect();
        let mut order: Vec<usize> = (0..self.agents.len()).collect();
        match self.kind {
            MultiplayerKind::Random => order.sort_by_key(|&i| (self.appearances[i], jitter[i])),
            MultiplayerKind::Swiss => order.sort_by(|&a, &b| {
                self.appearances[a]
                    .cmp(&self.appearances[b])
                    .then(strength(b).total_cmp(&strength(a)))
                    .then(jitter[a].cmp(&jitter[b]))
            }),
        }
        let mut chosen: Vec<usize> = order[..tables * self.table_size].to_vec();
        match self.kind {
            MultiplayerKind::Random => chosen.shuffle(&mut rng),
            MultiplayerKind::Swiss => chosen.sort_by(|&a, &b| {
                strength(b)
                    .total_cmp(&strength(a))
                    .then(jitter[a].cmp(&jitter[b]))
            }),
        }
        let mut out = Vec::with_capacity(tables);
        for table in chosen.chunks(self.table_size) {
            let mut seats: Vec<usize> = table.to_vec();
            seats.shuffle(&mut rng);
            for &i in &seats {
                self.appearances[i] += 1;
            }
            let index = self.planned;
            out.push(ScheduledMatch {
                index,
                match_id: match_id(&self.config, index),
                config: self.config,
                agents: seats.iter().map(|&i| self.agents[i].clone()).collect(),
                seed: seed::derive(self.seed, seed::derive(seed::tag_of("table"), index as u64)),
            });
            self.planned += 1;
        }
        self.wave += 1;
        out
    }
}

/// All tables for a multi-seat game. Swiss waves use the fixed `ratings`
/// snapshot; the executor can instead drive a [`SwissPlanner`] and feed
/// updated ratings between waves.
pub fn schedule_multiplayer(
    agents: &[String],
    config: GameConfig,
    table_size: usize,
    budget: usize,
    kind: MultiplayerKind,
    seed: u64,
    ratings: &BTreeMap<String, Rating>,
) -> Result<Schedule, ScheduleError> {
    let mut planner = SwissPlanner::new(agents, config, table_size, budget, kind, seed)?;
    let mut matches = Vec::with_capacity(budget);
    while !planner.is_done() {
        matches.extend(planner.next_wave(ratings));
    }
    let kind = match kind {
        MultiplayerKind::Swiss => ScheduleKind::Swiss,
        MultiplayerKind::Random => ScheduleKind::Sampled,
    };
    Ok(Schedule { kind, matches })
}

/// Every agent plays every instance once, instance-major, so all agents see
/// the same instances in the same order.
pub fn schedule_challenge_set(
    agents: &[String],
    instances: &[Instance],
) -> Result<Schedule, ScheduleError> {
    if instances.is_empty() {
        return Err(ScheduleError::NoInstances);
    }
    if agents.is_empty() {
        return Err(ScheduleError::TooFewAgents { needed: 1, got: 0 });
    }
    check_unique(agents)?;
    let mut matches = Vec::with_capacity(agents.len() * instances.len());
    for inst in instances {
        if !inst.config.game_id().is_single_player() {
            return Err(ScheduleError::WrongGame(inst.config.game_id().as_str()));
        }
        for a in agents {
            let index = matches.len();
            matches.push(ScheduledMatch {
                index,
                match_id: match_id(&inst.config, index),
                config: inst.config,
                agents: alloc::vec![a.clone()],
                seed: inst.seed,
            });
        }
    }
    Ok(Schedule {
        kind: ScheduleKind::ChallengeSet,
        matches,
    })
}
