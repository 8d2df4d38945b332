//! Run directory artifacts.
//!
//! ```text
//! <out>/<run_id>/
//!   config.json          effective configuration
//!   transcripts.ndjson   one MatchRecord per line, schedule order
//!   validation.json      every candidate with its test history
//!   leaderboard.{json,csv}
//!   metrics.{json,csv}
//! ```

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use anyhow::Context;
use arena_core::rating::RatingParams;
use arena_core::tournament::{Leaderboard, MetricsTable};
use arena_core::MatchRecord;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::pipeline::{RunOutput, ValidationEntry};

pub const TRANSCRIPTS: &str = "transcripts.ndjson";
pub const VALIDATION: &str = "validation.json";
pub const LEADERBOARD_JSON: &str = "leaderboard.json";
pub const LEADERBOARD_CSV: &str = "leaderboard.csv";
pub const METRICS_JSON: &str = "metrics.json";
pub const METRICS_CSV: &str = "metrics.csv";
pub const CONFIG_JSON: &str = "config.json";

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

pub fn rating_header(p: &RatingParams) -> String {
    format!(
        "rating: mu0={} sigma0={} beta={} tau={} draw_probability={}; leaderboard order is mu - 3*sigma",
        p.mu0, p.sigma0, p.beta, p.tau, p.draw_probability
    )
}

pub fn transcripts_ndjson(records: &[MatchRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn read_transcripts(path: &Path) -> anyhow::Result<Vec<MatchRecord>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut records = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: MatchRecord = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: not a match record", path.display(), n + 1))?;
        records.push(r);
    }
    Ok(records)
}

pub fn read_validation(path: &Path) -> anyhow::Result<Vec<ValidationEntry>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn leaderboard_json(board: &Leaderboard, params: &RatingParams) -> String {
    pretty(&json!({
        "rating_params": params,
        "header": rating_header(params),
        "games": board.games,
        "overall": board.overall,
    }))
}

#[derive(Serialize)]
struct BoardRow<'a> {
    scope: &'a str,
    rank: usize,
    agent: &'a str,
    mu: f64,
    sigma: f64,
    conservative: f64,
    average_rank: Option<f64>,
}

fn csv_string<T: Serialize>(
    header: Option<&str>,
    rows: impl IntoIterator<Item = T>,
    footer: Option<&str>,
) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("csv row");
    }
    let body = String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8 csv");
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&format!("# {h}\n"));
    }
    out.push_str(&body);
    if let Some(f) = footer {
        out.push_str(&format!("# {f}\n"));
    }
    out
}

/// Overall rows first (scope `overall`), then one block per game.
pub fn leaderboard_csv(board: &Leaderboard, params: &RatingParams) -> String {
    let overall = board.overall.iter().map(|r| BoardRow {
        scope: "overall",
        rank: r.rank,
        agent: &r.agent,
        mu: r.mu,
        sigma: r.sigma,
        conservative: r.conservative,
        average_rank: r.average_rank,
    });
    let games = board.games.iter().flat_map(|g| {
        g.entries.iter().map(move |e| BoardRow {
            scope: g.game.as_str(),
            rank: e.rank,
            agent: &e.agent,
            mu: e.mu,
            sigma: e.sigma,
            conservative: e.conservative,
            average_rank: None,
        })
    });
    csv_string(Some(&rating_header(params)), overall.chain(games), None)
}

pub fn metrics_json(table: &MetricsTable) -> String {
    pretty(table)
}

#[derive(Serialize)]
struct MetricsRow<'a> {
    agent: &'a str,
    rank: Option<usize>,
    generated: usize,
    deployed: usize,
    participation_pct: Option<f64>,
    avg_repairs: Option<f64>,
    pass_at_1: Option<f64>,
    repair_rate: Option<f64>,
    matches: usize,
    wins: usize,
    draws: usize,
    losses: usize,
    win_pct: Option<f64>,
    error_pct: Option<f64>,
    decisions: usize,
    speed_seconds: Option<f64>,
    mu: Option<f64>,
    sigma: Option<f64>,
    conservative: Option<f64>,
    average_rank: Option<f64>,
    /// `game:rank` pairs separated by `;`.
    per_game_rank: String,
}

pub fn metrics_csv(table: &MetricsTable) -> String {
    let rows = table.agents.iter().map(|a| MetricsRow {
        agent: &a.agent,
        rank: a.rank,
        generated: a.generated,
        deployed: a.deployed,
        participation_pct: a.participation_pct,
        avg_repairs: a.avg_repairs,
        pass_at_1: a.pass_at_1,
        repair_rate: a.repair_rate,
        matches: a.matches,
        wins: a.wins,
        draws: a.draws,
        losses: a.losses,
        win_pct: a.win_pct,
        error_pct: a.error_pct,
        decisions: a.decisions,
        speed_seconds: a.speed_seconds,
        mu: a.mu,
        sigma: a.sigma,
        conservative: a.conservative,
        average_rank: a.average_rank,
        per_game_rank: a
            .per_game_rank
            .iter()
            .map(|(g, r)| format!("{g}:{r}"))
            .collect::<Vec<_>>()
            .join(";"),
    });
    csv_string(
        Some(&rating_header(&table.rating_params)),
        rows,
        Some(&table.footnote),
    )
}

/// Tables derived from transcripts and candidates.
pub fn write_tables(
    dir: &Path,
    board: &Leaderboard,
    metrics: &MetricsTable,
    params: &RatingParams,
) -> anyhow::Result<()> {
    fs::write(dir.join(LEADERBOARD_JSON), leaderboard_json(board, params))?;
    fs::write(dir.join(LEADERBOARD_CSV), leaderboard_csv(board, params))?;
    fs::write(dir.join(METRICS_JSON), metrics_json(metrics))?;
    fs::write(dir.join(METRICS_CSV), metrics_csv(metrics))?;
    Ok(())
}

pub fn write_run(config: &RunConfig, output: &RunOutput) -> anyhow::Result<()> {
    let dir = &output.run_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join(CONFIG_JSON), pretty(config))?;
    fs::write(dir.join(TRANSCRIPTS), transcripts_ndjson(&output.records))?;
    fs::write(dir.join(VALIDATION), pretty(&output.validations))?;
    write_tables(
        dir,
        &output.leaderboard,
        &output.metrics,
        &config.rating.params(),
    )
}
