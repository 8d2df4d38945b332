//! generate → validate/repair → tournament → rate, for every round and game.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use arena_core::agents::builtin;
use arena_core::rating::RatingParams;
use arena_core::seed::{derive, tag_of};
use arena_core::tournament::{
    aggregate, leaderboard, rate_records, schedule_challenge_set, schedule_round_robin,
    CandidateSummary, Leaderboard, MetricsTable, Ratings, ScheduledMatch, SwissPlanner,
    Withdrawals, WITHDRAWAL_THRESHOLD,
};
use arena_core::validator::{
    build_prompt, generate_and_repair, suite_for, CandidateAgent, Coder, Launcher, RepairPolicy,
};
use arena_core::{GameDescriptor, GameId, MatchRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clock::MonotonicClock;
use crate::coder::{GatewayCoder, StaticCoder, GATEWAY_KEY_ENV};
use crate::config::{CoderKind, GameEntry, RunConfig};
use crate::instances::{challenge_set, tiers, InstanceFile};
use crate::launch::ProcessLauncher;
use crate::parallel::{execute_parallel, Registry};

/// One candidate as validated in one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub round: u32,
    pub candidate: CandidateAgent,
}

impl ValidationEntry {
    pub fn summary(&self) -> CandidateSummary {
        CandidateSummary {
            agent: self.candidate.coder.clone(),
            round: self.round,
            game: self.candidate.game,
            deployed: self.candidate.is_deployed(),
            iterations: self.candidate.iteration,
            passed_first: self.candidate.passed_first(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub run_dir: PathBuf,
    pub records: Vec<MatchRecord>,
    pub validations: Vec<ValidationEntry>,
    pub ratings: Ratings,
    pub leaderboard: Leaderboard,
    pub metrics: MetricsTable,
    /// Tournaments skipped or agents withdrawn, for the run log.
    pub notes: Vec<String>,
}

/// Everything the pipeline needs besides the config itself.
#[derive(Clone, Debug)]
pub struct RunContext {
    /// Directory static coder sources are resolved against.
    pub base_dir: PathBuf,
    pub workers: usize,
    pub run_dir: PathBuf,
}

pub fn build_coders(
    config: &RunConfig,
    ctx: &RunContext,
) -> anyhow::Result<Vec<Box<dyn Coder + Send>>> {
    let key = std::env::var(GATEWAY_KEY_ENV)
        .ok()
        .filter(|k| !k.is_empty());
    config
        .coders
        .iter()
        .enumerate()
        .map(|(i, c)| -> anyhow::Result<Box<dyn Coder + Send>> {
            Ok(match c.kind {
                CoderKind::Static => Box::new(
                    StaticCoder::from_entries(&c.name, &c.sources, &ctx.base_dir)
                        .with_context(|| format!("coders[{i}].sources"))?,
                ),
                CoderKind::Gateway => {
                    let timeout = Duration::from_secs_f64(c.timeout_seconds.unwrap_or(120.0));
                    let endpoint = c.endpoint.clone().unwrap_or_default();
                    let model = c.model.clone().unwrap_or_default();
                    Box::new(
                        GatewayCoder::new(&c.name, endpoint, model, timeout)
                            .with_key(key.clone())
                            .with_log(ctx.run_dir.join("gateway").join(format!("{}.log", c.name))),
                    )
                }
            })
        })
        .collect()
}

pub fn round_seed(seed: u64, round: u32) -> u64 {
    derive(seed, round as u64)
}

fn game_seed(round_seed: u64, index: usize, game: GameId) -> u64 {
    derive(round_seed, tag_of(game.as_str()) ^ index as u64)
}

fn candidate_dir(ctx: &RunContext, round: u32, index: usize, game: GameId, coder: &str) -> PathBuf {
    ctx.run_dir
        .join("agents")
        .join(format!("r{round}"))
        .join(format!("{index}-{game}"))
        .join(coder)
}

/// Generation and validation for every coder on one game. Coders run in
/// parallel; the result is in config order.
pub fn validate_game(
    config: &RunConfig,
    ctx: &RunContext,
    coders: &mut [Box<dyn Coder + Send>],
    round: u32,
    index: usize,
    entry: &GameEntry,
) -> anyhow::Result<Vec<ValidationEntry>> {
    let descriptor = entry.game_config().descriptor()?;
    let prompt = build_prompt(&descriptor);
    let suite = suite_for(&descriptor);
    let limits = config.limits.resource_limits();
    let settings = config.launch_settings();
    let seed = game_seed(round_seed(config.seed, round), index, descriptor.game_id);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.workers.max(1))
        .build()?;
    let policy = RepairPolicy::default();
    let candidates: Vec<CandidateAgent> = pool.install(|| {
        coders
            .par_iter_mut()
            .map(|coder| {
                let name = coder.name().to_owned();
                let dir = candidate_dir(ctx, round, index, descriptor.game_id, &name);
                let mut launcher =
                    ProcessLauncher::new(&name, dir, settings.clone(), derive(seed, tag_of(&name)));
                let clock = MonotonicClock::new();
                generate_and_repair(
                    &mut **coder,
                    &mut launcher,
                    None,
                    &prompt,
                    &suite,
                    &limits,
                    &policy,
                    &clock,
                )
            })
            .collect()
    });
    Ok(candidates
        .into_iter()
        .map(|candidate| ValidationEntry { round, candidate })
        .collect())
}

fn prefixed(round: u32, mut m: ScheduledMatch) -> ScheduledMatch {
    m.match_id = format!("r{round}-{}", m.match_id);
    m
}

fn instances_for(
    entry: &GameEntry,
    base_dir: &Path,
    seed: u64,
) -> anyhow::Result<Vec<arena_core::tournament::Instance>> {
    if !entry.instance_files.is_empty() {
        return entry
            .instance_files
            .iter()
            .map(|p| {
                let inst = InstanceFile::load(&base_dir.join(p))?;
                if inst.config.game_id() != entry.game {
                    bail!("{} holds a {} instance", p.display(), inst.config.game_id());
                }
                Ok(inst)
            })
            .collect();
    }
    let config = entry.game_config();
    // Explicit size parameters pin a single tier.
    let pinned = entry.clues.is_some()
        || entry.disks.is_some()
        || entry.width.is_some()
        || entry.height.is_some();
    let configs = if pinned { vec![config] } else { tiers(&config) };
    Ok(challenge_set(
        &configs,
        entry.instances_per_tier.unwrap_or(5),
        seed,
    ))
}

/// Builds the tournament field: deployed candidates, then baselines.
fn field(
    config: &RunConfig,
    ctx: &RunContext,
    round: u32,
    index: usize,
    descriptor: &GameDescriptor,
    validations: &[ValidationEntry],
    seed: u64,
) -> anyhow::Result<(Vec<String>, Registry)> {
    let game = descriptor.game_id;
    let settings = config.launch_settings();
    let mut ids = Vec::new();
    let mut registry = Registry::new();
    for v in validations.iter().filter(|v| v.candidate.is_deployed()) {
        let name = &v.candidate.coder;
        let dir = candidate_dir(ctx, round, index, game, name).join("deploy");
        let mut launcher =
            ProcessLauncher::new(name, dir, settings.clone(), derive(seed, tag_of(name)));
        registry.insert(
            name.clone(),
            launcher.launch(game, &v.candidate.source, v.candidate.iteration),
        );
        ids.push(name.clone());
    }
    for b in &config.baselines {
        registry.insert(
            b.clone(),
            builtin(b, b.as_str(), game, derive(seed, tag_of(b)))?,
        );
        ids.push(b.clone());
    }
    Ok((ids, registry))
}

fn draw_probabilities(config: &RunConfig) -> BTreeMap<GameId, f64> {
    config
        .games
        .iter()
        .filter_map(|g| g.draw_probability.map(|p| (g.game, p)))
        .collect()
}

/// Plays one game's tournament for one round.
#[allow(clippy::too_many_arguments)]
fn tournament(
    config: &RunConfig,
    ctx: &RunContext,
    round: u32,
    index: usize,
    entry: &GameEntry,
    validations: &[ValidationEntry],
    notes: &mut Vec<String>,
) -> anyhow::Result<Vec<MatchRecord>> {
    let game_config = entry.game_config();
    let descriptor = game_config.descriptor()?;
    let game = descriptor.game_id;
    let seed = game_seed(round_seed(config.seed, round), index, game);
    let (ids, mut registry) = field(config, ctx, round, index, &descriptor, validations, seed)?;
    let limits = config.limits.resource_limits();
    let mut policy = Withdrawals::new(WITHDRAWAL_THRESHOLD);
    let mut records = Vec::new();
    let needed = descriptor.seats;
    if ids.len() < needed {
        notes.push(format!(
            "round {round} {game}: {} agent(s) deployed, no tournament",
            ids.len()
        ));
        return Ok(records);
    }
    if game.is_single_player() {
        let instances = instances_for(entry, &ctx.base_dir, seed)?;
        let schedule = schedule_challenge_set(&ids, &instances)?;
        let matches: Vec<ScheduledMatch> = schedule
            .matches
            .into_iter()
            .map(|m| prefixed(round, m))
            .collect();
        records = execute_parallel(&matches, &mut registry, &limits, ctx.workers, &mut policy)?;
    } else if descriptor.seats == 2 {
        let schedule = schedule_round_robin(&ids, game_config, entry.rounds_per_pair, seed)?;
        let matches: Vec<ScheduledMatch> = schedule
            .matches
            .into_iter()
            .map(|m| prefixed(round, m))
            .collect();
        records = execute_parallel(&matches, &mut registry, &limits, ctx.workers, &mut policy)?;
    } else {
        let seats = descriptor.seats;
        let budget = entry.budget.unwrap_or(10 * (ids.len() / seats).max(1));
        let mut planner = SwissPlanner::new(
            &ids,
            game_config,
            seats,
            budget,
            entry.multiplayer_kind(),
            seed,
        )?;
        let params = config.rating.params();
        let draws = draw_probabilities(config);
        while !planner.is_done() {
            // Waves are paired on the ratings of this tournament so far.
            let ratings = rate_records(&records, &params, &draws)?;
            let current = ratings.per_game.get(&game).cloned().unwrap_or_default();
            let wave: Vec<ScheduledMatch> = planner
                .next_wave(&current)
                .into_iter()
                .map(|m| prefixed(round, m))
                .collect();
            if wave.is_empty() {
                break;
            }
            records.extend(execute_parallel(
                &wave,
                &mut registry,
                &limits,
                ctx.workers,
                &mut policy,
            )?);
        }
    }
    for (g, agent) in policy.withdrawn_agents() {
        notes.push(format!("round {round} {g}: {agent} withdrawn after {WITHDRAWAL_THRESHOLD} consecutive forfeits"));
    }
    Ok(records)
}

/// Ratings, leaderboard and metrics over everything played.
pub fn rank(
    config: &RunConfig,
    records: &[MatchRecord],
    candidates: &[CandidateSummary],
) -> anyhow::Result<(Ratings, Leaderboard, MetricsTable)> {
    let params: RatingParams = config.rating.params();
    let ratings = rate_records(records, &params, &draw_probabilities(config))?;
    let board = leaderboard(&ratings);
    let metrics = aggregate(records, candidates, &board, &params, config.draw_policy);
    Ok((ratings, board, metrics))
}

/// Runs every round without writing reports.
pub fn run_pipeline(config: &RunConfig, ctx: &RunContext) -> anyhow::Result<RunOutput> {
    config.validate()?;
    let mut coders = build_coders(config, ctx)?;
    let mut records = Vec::new();
    let mut validations = Vec::new();
    let mut notes = Vec::new();
    if config.agents.sandbox && crate::sandbox::landlock_abi().is_none() {
        notes.push(
            "landlock is unavailable: agent processes get a scrubbed environment and rlimits only"
                .to_owned(),
        );
    }
    for round in 0..config.rounds {
        for (index, entry) in config.games.iter().enumerate() {
            let entries = validate_game(config, ctx, &mut coders, round, index, entry)?;
            records.extend(tournament(
                config, ctx, round, index, entry, &entries, &mut notes,
            )?);
            validations.extend(entries);
        }
    }
    let summaries: Vec<CandidateSummary> =
        validations.iter().map(ValidationEntry::summary).collect();
    let (ratings, leaderboard, metrics) = rank(config, &records, &summaries)?;
    Ok(RunOutput {
        run_dir: ctx.run_dir.clone(),
        records,
        validations,
        ratings,
        leaderboard,
        metrics,
        notes,
    })
}
