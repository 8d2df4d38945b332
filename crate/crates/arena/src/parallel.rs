//! Parallel match execution with schedule-ordered commits.
//!
//! Matches are cut into batches of consecutive entries whose agents are
//! pairwise disjoint. Each agent therefore sees its matches in schedule
//! order, and since no record in a batch can change the withdrawal status of
//! another match in the same batch, the records equal a sequential run.

use std::collections::{BTreeMap, BTreeSet};

use arena_core::agents::Agent;
use arena_core::clock::{Clock, FrozenClock};
use arena_core::engine::{run_match, RunError};
use arena_core::tournament::{ScheduledMatch, Withdrawals};
use arena_core::{MatchRecord, ResourceLimits};
use rayon::prelude::*;

use crate::clock::MonotonicClock;

pub type Registry = BTreeMap<String, Box<dyn Agent + Send>>;

/// Logical cores, at least 1.
pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

enum Slot {
    Forfeit(MatchRecord),
    Play(Vec<(String, Box<dyn Agent + Send>)>),
}

/// Runs `matches` on up to `workers` threads. Every scheduled id must be in
/// `registry`; `policy` carries withdrawal state across calls.
pub fn execute_parallel(
    matches: &[ScheduledMatch],
    registry: &mut Registry,
    limits: &ResourceLimits,
    workers: usize,
    policy: &mut Withdrawals,
) -> Result<Vec<MatchRecord>, RunError> {
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let mut records = Vec::with_capacity(matches.len());
    let mut start = 0;
    while start < matches.len() {
        let mut busy: BTreeSet<&str> = BTreeSet::new();
        let mut end = start;
        while end < matches.len() && end - start < workers {
            let m = &matches[end];
            if m.agents.iter().any(|a| busy.contains(a.as_str())) {
                break;
            }
            busy.extend(m.agents.iter().map(String::as_str));
            end += 1;
        }
        let batch = &matches[start..end];
        let slots: Vec<Slot> = batch
            .iter()
            .map(|m| match policy.withdrawn_seat(m) {
                Some(seat) => Slot::Forfeit(Withdrawals::forfeit_record(m, seat)),
                None => Slot::Play(
                    m.agents
                        .iter()
                        .map(|id| {
                            let agent = registry
                                .remove(id)
                                .unwrap_or_else(|| panic!("agent `{id}` not registered"));
                            (id.clone(), agent)
                        })
                        .collect(),
                ),
            })
            .collect();
        let results: Vec<(
            Result<MatchRecord, RunError>,
            Vec<(String, Box<dyn Agent + Send>)>,
        )> = pool.install(|| {
            batch
                .par_iter()
                .zip(slots.into_par_iter())
                .map(|(m, slot)| match slot {
                    Slot::Forfeit(r) => (Ok(r), Vec::new()),
                    Slot::Play(mut taken) => {
                        let result = play(m, &mut taken, limits);
                        (result, taken)
                    }
                })
                .collect()
        });
        let mut first_error = None;
        for (m, (result, taken)) in batch.iter().zip(results) {
            registry.extend(taken);
            match result {
                Ok(r) if first_error.is_none() => records.push(policy.commit(m, r)),
                Ok(_) => {}
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
        if let Some(e) = first_error {
            return Err(e);
        }
        start = end;
    }
    Ok(records)
}

fn play(
    m: &ScheduledMatch,
    taken: &mut [(String, Box<dyn Agent + Send>)],
    limits: &ResourceLimits,
) -> Result<MatchRecord, RunError> {
    let descriptor = m
        .config
        .descriptor()
        .map_err(|e| RunError::Engine(e.into()))?;
    // Wall time is only measured when someone is on a real clock; matches
    // between in-process agents stay byte-reproducible.
    let metered = taken.iter().any(|(_, a)| a.is_metered());
    let monotonic;
    let clock: &dyn Clock = if metered {
        monotonic = MonotonicClock::new();
        &monotonic
    } else {
        &FrozenClock
    };
    let mut seats: Vec<&mut dyn Agent> = taken
        .iter_mut()
        .map(|(_, a)| &mut **a as &mut dyn Agent)
        .collect();
    run_match(&descriptor, &mut seats, limits, m.seed, &m.match_id, clock)
}
