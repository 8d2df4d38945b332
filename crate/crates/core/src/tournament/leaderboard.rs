use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::engine::{GameId, MatchRecord, Outcome};
use crate::rating::{
    new_rating, solo_ranks, update_pair, update_ranked, PairOutcome, Rating, RatingError,
    RatingParams, SoloResult,
};

/// Ratings after replaying a list of transcripts in order: one table per
/// game plus an overall table fed by every game.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ratings {
    pub per_game: BTreeMap<GameId, BTreeMap<String, Rating>>,
    pub overall: BTreeMap<String, Rating>,
}

impl Ratings {
    fn get(table: &BTreeMap<String, Rating>, id: &str, params: &RatingParams) -> Rating {
        table.get(id).copied().unwrap_or_else(|| new_rating(params))
    }

    fn apply(
        table: &mut BTreeMap<String, Rating>,
        ids: &[String],
        ranks: &[usize],
        params: &RatingParams,
    ) -> Result<(), RatingError> {
        let priors: Vec<Rating> = ids.iter().map(|id| Self::get(table, id, params)).collect();
        let posts = if ids.len() == 2 {
            let outcome = match ranks[0].cmp(&ranks[1]) {
                core::cmp::Ordering::Less => PairOutcome::AWins,
                core::cmp::Ordering::Greater => PairOutcome::BWins,
                core::cmp::Ordering::Equal => PairOutcome::Draw,
            };
            let (a, b) = update_pair(priors[0], priors[1], outcome, params)?;
            alloc::vec![a, b]
        } else {
            update_ranked(&priors, ranks, params)?
        };
        for (id, r) in ids.iter().zip(posts) {
            table.insert(id.clone(), r);
        }
        Ok(())
    }

    fn update(
        &mut self,
        game: GameId,
        ids: &[String],
        ranks: &[usize],
        params: &RatingParams,
    ) -> Result<(), RatingError> {
        if ids.len() < 2 {
            return Ok(());
        }
        Self::apply(self.per_game.entry(game).or_default(), ids, ranks, params)?;
        Self::apply(&mut self.overall, ids, ranks, params)
    }
}

fn solo_result(r: &MatchRecord) -> SoloResult {
    SoloResult {
        success: matches!(r.outcome, Outcome::Winner { seat: 0 }),
        score: r.scores.first().copied().unwrap_or(0.0),
        steps: r.steps.len() as u64,
        time: r.total_latency(0),
    }
}

/// Replays transcripts in the given (schedule) order. Multi-seat records
/// update from their finish ranks; consecutive single-player records of the
/// same instance are compared with each other as one ranked result.
/// `draw_probability` overrides the default per game.
pub fn rate_records(
    records: &[MatchRecord],
    params: &RatingParams,
    draw_probability: &BTreeMap<GameId, f64>,
) -> Result<Ratings, RatingError> {
    params.validate()?;
    let params_for = |g: GameId| RatingParams {
        draw_probability: draw_probability
            .get(&g)
            .copied()
            .unwrap_or(params.draw_probability),
        ..*params
    };
    let mut ratings = Ratings::default();
    let mut i = 0;
    while i < records.len() {
        let r = &records[i];
        let p = params_for(r.game_id);
        p.validate()?;
        if r.seats() > 1 {
            ratings.update(r.game_id, &r.agents, &r.finish_ranks(), &p)?;
            for id in &r.agents {
                ratings
                    .per_game
                    .entry(r.game_id)
                    .or_default()
                    .entry(id.clone())
                    .or_insert_with(|| new_rating(&p));
                ratings
                    .overall
                    .entry(id.clone())
                    .or_insert_with(|| new_rating(&p));
            }
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < records.len()
            && records[j].seats() == 1
            && records[j].config == r.config
            && records[j].seed == r.seed
        {
            j += 1;
        }
        let group = &records[i..j];
        let ids: Vec<String> = group.iter().map(|g| g.agents[0].clone()).collect();
        let results: Vec<SoloResult> = group.iter().map(solo_result).collect();
        ratings.update(r.game_id, &ids, &solo_ranks(&results), &p)?;
        for id in &ids {
            ratings
                .per_game
                .entry(r.game_id)
                .or_default()
                .entry(id.clone())
                .or_insert_with(|| new_rating(&p));
            ratings
                .overall
                .entry(id.clone())
                .or_insert_with(|| new_rating(&p));
        }
        i = j;
    }
    Ok(ratings)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub agent: String,
    pub mu: f64,
    pub sigma: f64,
    pub conservative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameBoard {
    pub game: GameId,
    pub entries: Vec<RankedEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverallRow {
    pub rank: usize,
    pub agent: String,
    pub mu: f64,
    pub sigma: f64,
    pub conservative: f64,
    pub per_game_rank: BTreeMap<GameId, usize>,
    /// Mean of the per-game ranks over the games the agent played.
    pub average_rank: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    pub games: Vec<GameBoard>,
    pub overall: Vec<OverallRow>,
}

/// Sorted by conservative estimate, then mean, both descending, then id.
fn ranked(table: &BTreeMap<String, Rating>) -> Vec<RankedEntry> {
    let mut rows: Vec<(&String, &Rating)> = table.iter().collect();
    rows.sort_by(|(ia, a), (ib, b)| {
        b.conservative()
            .total_cmp(&a.conservative())
            .then(b.mu.total_cmp(&a.mu))
            .then(ia.cmp(ib))
    });
    rows.into_iter()
        .enumerate()
        .map(|(k, (id, r))| RankedEntry {
            rank: k + 1,
            agent: id.clone(),
            mu: r.mu,
            sigma: r.sigma,
            conservative: r.conservative(),
        })
        .collect()
}

pub fn leaderboard(ratings: &Ratings) -> Leaderboard {
    let games: Vec<GameBoard> = ratings
        .per_game
        .iter()
        .map(|(g, t)| GameBoard {
            game: *g,
            entries: ranked(t),
        })
        .collect();
    let overall = ranked(&ratings.overall)
        .into_iter()
        .map(|e| {
            let per_game_rank: BTreeMap<GameId, usize> = games
                .iter()
                .filter_map(|b| {
                    b.entries
                        .iter()
                        .find(|x| x.agent == e.agent)
                        .map(|x| (b.game, x.rank))
                })
                .collect();
            let average_rank = (!per_game_rank.is_empty())
                .then(|| per_game_rank.values().sum::<usize>() as f64 / per_game_rank.len() as f64);
            OverallRow {
                rank: e.rank,
                agent: e.agent,
                mu: e.mu,
                sigma: e.sigma,
                conservative: e.conservative,
                per_game_rank,
                average_rank,
            }
        })
        .collect();
    Leaderboard { games, overall }
}
