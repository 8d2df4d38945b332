use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::leaderboard::Leaderboard;
use crate::engine::{GameId, MatchRecord, Outcome};
use crate::rating::RatingParams;

/// How draws enter the win percentage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawPolicy {
    /// Draws add nothing to the numerator.
    #[default]
    Zero,
    /// Draws count as half a win.
    Half,
}

impl DrawPolicy {
    pub const fn footnote(self) -> &'static str {
        match self {
            DrawPolicy::Zero => "Win% = wins / matches * 100; draws count 0 in the numerator; a solved puzzle is a win.",
            DrawPolicy::Half => "Win% = (wins + draws / 2) / matches * 100; a solved puzzle is a win.",
        }
    }
}

/// One generated candidate, as reported by the validator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub agent: String,
    pub round: u32,
    pub game: GameId,
    pub deployed: bool,
    /// Repairs used (0..=3).
    pub iterations: u32,
    /// Whether the first, unrepaired version passed every test.
    pub passed_first: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentMetrics {
    pub agent: String,
    pub generated: usize,
    pub deployed: usize,
    /// Deployed / generated * 100.
    pub participation_pct: Option<f64>,
    /// Mean repairs per candidate (A.R.).
    pub avg_repairs: Option<f64>,
    pub pass_at_1: Option<f64>,
    pub repair_rate: Option<f64>,
    pub matches: usize,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
    pub win_pct: Option<f64>,
    /// Matches with at least one failed decision or a forfeit, in percent.
    pub error_pct: Option<f64>,
    pub decisions: usize,
    /// Mean decision latency in seconds.
    pub speed_seconds: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub conservative: Option<f64>,
    pub rank: Option<usize>,
    pub per_game_rank: BTreeMap<GameId, usize>,
    pub average_rank: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticMetrics {
    pub candidates: usize,
    pub pass_at_1: Option<f64>,
    pub repair_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub draw_policy: DrawPolicy,
    pub footnote: String,
    pub rating_params: RatingParams,
    pub agents: Vec<AgentMetrics>,
    pub overall: StaticMetrics,
}

fn pct(num: f64, den: usize) -> Option<f64> {
    (den > 0).then(|| num * 100.0 / den as f64)
}

/// Pass@1: share of candidates whose first version passed. Repair rate:
/// among those that failed first, the share eventually deployed.
pub fn static_metrics(candidates: &[&CandidateSummary]) -> StaticMetrics {
    let first_fail: Vec<_> = candidates.iter().filter(|c| !c.passed_first).collect();
    let passed = candidates.len() - first_fail.len();
    let repaired = first_fail.iter().filter(|c| c.deployed).count();
    StaticMetrics {
        candidates: candidates.len(),
        pass_at_1: (!candidates.is_empty()).then(|| passed as f64 / candidates.len() as f64),
        repair_rate: (!first_fail.is_empty()).then(|| repaired as f64 / first_fail.len() as f64),
    }
}

pub fn aggregate(
    records: &[MatchRecord],
    candidates: &[CandidateSummary],
    board: &Leaderboard,
    rating_params: &RatingParams,
    draw_policy: DrawPolicy,
) -> MetricsTable {
    let mut ids: BTreeSet<&str> = candidates.iter().map(|c| c.agent.as_str()).collect();
    for r in records {
        ids.extend(r.agents.iter().map(String::as_str));
    }
    let mut rows: Vec<AgentMetrics> = ids
        .into_iter()
        .map(|id| {
            let mine: Vec<&CandidateSummary> =
                candidates.iter().filter(|c| c.agent == id).collect();
            let deployed = mine.iter().filter(|c| c.deployed).count();
            let st = static_metrics(&mine);
            let (mut matches, mut wins, mut draws, mut errors) = (0, 0, 0, 0);
            let (mut decisions, mut latency) = (0usize, 0.0f64);
            for r in records {
                for seat in (0..r.seats()).filter(|&s| r.agents[s] == id) {
                    matches += 1;
                    if r.is_win_for(seat) {
                        wins += 1;
                    } else if r.outcome == Outcome::Draw {
                        draws += 1;
                    }
                    if r.had_failure(seat) {
                        errors += 1;
                    }
                    for s in r.steps.iter().filter(|s| s.seat == seat) {
                        decisions += 1;
                        latency += s.latency_seconds;
                    }
                }
            }
            let credit = match draw_policy {
                DrawPolicy::Zero => wins as f64,
                DrawPolicy::Half => wins as f64 + draws as f64 / 2.0,
            };
            let overall = board.overall.iter().find(|r| r.agent == id);
            AgentMetrics {
                agent: String::from(id),
                generated: mine.len(),
                deployed,
                participation_pct: pct(deployed as f64, mine.len()),
                avg_repairs: (!mine.is_empty()).then(|| {
                    mine.iter().map(|c| f64::from(c.iterations)).sum::<f64>() / mine.len() as f64
                }),
                pass_at_1: st.pass_at_1,
                repair_rate: st.repair_rate,
                matches,
                wins,
                draws,
                losses: matches - wins - draws,
                win_pct: pct(credit, matches),
                error_pct: pct(errors as f64, matches),
                decisions,
                speed_seconds: (decisions > 0).then(|| latency / decisions as f64),
                mu: overall.map(|r| r.mu),
                sigma: overall.map(|r| r.sigma),
                conservative: overall.map(|r| r.conservative),
                rank: overall.map(|r| r.rank),
                per_game_rank: overall.map(|r| r.per_game_rank.clone()).unwrap_or_default(),
                average_rank: overall.and_then(|r| r.average_rank),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.rank
            .unwrap_or(usize::MAX)
            .cmp(&b.rank.unwrap_or(usize::MAX))
            .then(a.agent.cmp(&b.agent))
    });
    let all: Vec<&CandidateSummary> = candidates.iter().collect();
    MetricsTable {
        draw_policy,
        footnote: String::from(draw_policy.footnote()),
        rating_params: *rating_params,
        agents: rows,
        overall: static_metrics(&all),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{FailureKind, GameConfig, StepRecord};
    use crate::tournament::{leaderboard, Ratings};
    use alloc::string::ToString;
    use alloc::vec;

    fn record(agents: [&str; 2], outcome: Outcome, error_seat: Option<usize>) -> MatchRecord {
        MatchRecord {
            match_id: "m".into(),
            game_id: GameId::TicTacToe,
            config: GameConfig::TicTacToe,
            agents: agents.iter().map(|s| s.to_string()).collect(),
            seed: 0,
            steps: vec![
                StepRecord {
                    seat: 0,
                    action: Some(0),
                    latency_seconds: 0.5,
                    error: None,
                },
                StepRecord {
                    seat: 1,
                    action: None,
                    latency_seconds: 1.5,
                    error: error_seat.map(|_| FailureKind::Timeout),
                },
            ],
            outcome,
            scores: vec![0.0, 0.0],
            wall_time: 2.0,
            withdrawn: false,
        }
    }

    #[test]
    fn win_error_and_speed() {
        let mut records = Vec::new();
        for k in 0..20 {
            let outcome = if k < 10 {
                Outcome::Winner { seat: 0 }
            } else {
                Outcome::Winner { seat: 1 }
            };
            records.push(record(["a", "b"], outcome, None));
        }
        records[19] = record(
            ["a", "b"],
            Outcome::Forfeit {
                seat: 1,
                cause: FailureKind::Timeout,
            },
            Some(1),
        );
        let lb = leaderboard(&Ratings::default());
        let t = aggregate(
            &records,
            &[],
            &lb,
            &RatingParams::default(),
            DrawPolicy::Zero,
        );
        let a = t.agents.iter().find(|r| r.agent == "a").unwrap();
        assert_eq!(a.win_pct, Some(55.0));
        assert_eq!(a.error_pct, Some(0.0));
        assert_eq!(a.speed_seconds, Some(0.5));
        let b = t.agents.iter().find(|r| r.agent == "b").unwrap();
        assert_eq!(b.win_pct, Some(45.0));
        assert_eq!(b.error_pct, Some(5.0));
        assert_eq!(b.speed_seconds, Some(1.5));
        // wins + losses + 2 draws over both agents = 2 * matches.
        let total: usize = t
            .agents
            .iter()
            .map(|r| r.wins + r.losses + 2 * r.draws)
            .sum();
        assert_eq!(total, 40);
    }

    #[test]
    fn draws_and_candidates() {
        let records: Vec<_> = (0..4)
            .map(|_| record(["a", "b"], Outcome::Draw, None))
            .collect();
        let cands = [
            CandidateSummary {
                agent: "a".into(),
                round: 0,
                game: GameId::TicTacToe,
                deployed: true,
                iterations: 0,
                passed_first: true,
            },
            CandidateSummary {
                agent: "c".into(),
                round: 0,
                game: GameId::TicTacToe,
                deployed: false,
                iterations: 3,
                passed_first: false,
            },
            CandidateSummary {
                agent: "c".into(),
                round: 1,
                game: GameId::TicTacToe,
                deployed: true,
                iterations: 1,
                passed_first: false,
            },
        ];
        let lb = leaderboard(&Ratings::default());
        let t = aggregate(
            &records,
            &cands,
            &lb,
            &RatingParams::default(),
            DrawPolicy::Half,
        );
        let a = t.agents.iter().find(|r| r.agent == "a").unwrap();
        assert_eq!(a.win_pct, Some(50.0));
        let c = t.agents.iter().find(|r| r.agent == "c").unwrap();
        assert_eq!(c.participation_pct, Some(50.0));
        assert_eq!(c.avg_repairs, Some(2.0));
        assert_eq!(c.repair_rate, Some(0.5));
        assert_eq!(c.matches, 0);
        assert_eq!(t.overall.pass_at_1, Some(1.0 / 3.0));
    }
}
