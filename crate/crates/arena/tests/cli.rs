//! The `arena` binary end to end.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use arena_core::tournament::MetricsTable;
use arena_core::MatchRecord;

fn arena(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arena"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("arena binary runs")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const BUILTIN_TTT: &str = r#"{
  "seed": 7,
  "rounds": 1,
  "workers": 2,
  "run_id": "ttt",
  "games": [{"game": "tictactoe", "rounds_per_pair": 2}],
  "coders": [
    {"name": "alpha", "kind": "static", "sources": ["builtin:reference"]},
    {"name": "beta", "kind": "static", "sources": ["builtin:greedy"]}
  ],
  "baselines": ["random"]
}"#;

#[test]
fn run_writes_the_report_set() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("first_legal.py"), dir.path().join("first_legal.py")).unwrap();
    std::fs::copy(fixture("exit_now.py"), dir.path().join("exit_now.py")).unwrap();
    write(
        dir.path(),
        "run.toml",
        r#"
seed = 1
rounds = 1
run_id = "mixed"
baselines = ["random"]

[[games]]
game = "tictactoe"

[[coders]]
name = "scripted"
kind = "static"
sources = ["exit_now.py", "first_legal.py"]

[[coders]]
name = "hopeless"
kind = "static"
sources = ["exit_now.py"]
"#,
    );
    let out = arena(&["run", "--config", "run.toml", "--out", "out"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = dir.path().join("out/mixed");
    for f in [
        "leaderboard.csv",
        "leaderboard.json",
        "metrics.json",
        "metrics.csv",
        "transcripts.ndjson",
        "validation.json",
        "config.json",
    ] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
    let metrics: MetricsTable =
        serde_json::from_str(&std::fs::read_to_string(run.join("metrics.json")).unwrap()).unwrap();
    let row = |id: &str| {
        metrics
            .agents
            .iter()
            .find(|a| a.agent == id)
            .unwrap()
            .clone()
    };
    let scripted = row("scripted");
    assert_eq!((scripted.generated, scripted.deployed), (1, 1));
    assert_eq!(scripted.avg_repairs, Some(1.0));
    assert_eq!(scripted.matches, 2);
    let hopeless = row("hopeless");
    assert_eq!(
        (hopeless.generated, hopeless.deployed, hopeless.matches),
        (1, 0, 0)
    );
    assert_eq!(hopeless.participation_pct, Some(0.0));
    assert_eq!(hopeless.avg_repairs, Some(3.0));
    let transcripts = std::fs::read_to_string(run.join("transcripts.ndjson")).unwrap();
    let records: Vec<MatchRecord> = transcripts
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|r| r.match_id.starts_with("r0-")));
    assert!(std::fs::read_to_string(run.join("metrics.csv"))
        .unwrap()
        .trim_end()
        .ends_with("a solved puzzle is a win."));
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", r#"{"games":[{"game":"chess"}]}"#);
    let out = arena(&["run", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chess"));

    write(
        dir.path(),
        "typo.json",
        r#"{"games":[{"game":"tictactoe"}],"limits":{"timeout":3}}"#,
    );
    let out = arena(&["run", "--config", "typo.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("limits") && err.contains("timeout"), "{err}");

    write(dir.path(), "ok.json", r#"{"games":[{"game":"tictactoe"}]}"#);
    let out = arena(&["run", "--config", "ok.json", "--rounds", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rounds"));
}

#[test]
fn play_prints_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = arena(
        &[
            "play",
            "tictactoe",
            "builtin:minimax",
            "builtin:random",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    let record: MatchRecord = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(record.agents.len(), 2);
    assert!(!record.is_win_for(1));

    let script = fixture("first_legal.py");
    let out = arena(
        &[
            "play",
            "connect4",
            script.to_str().unwrap(),
            "builtin:random",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let record: MatchRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!record.had_failure(0));
}

#[test]
fn same_config_twice_gives_identical_bytes_and_rate_report_agree() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ttt.json", BUILTIN_TTT);
    for out_dir in ["a", "b"] {
        let out = arena(
            &["run", "--config", "ttt.json", "--out", out_dir],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    for f in [
        "metrics.json",
        "transcripts.ndjson",
        "leaderboard.json",
        "leaderboard.csv",
        "metrics.csv",
    ] {
        assert_eq!(
            read(&format!("a/ttt/{f}")),
            read(&format!("b/ttt/{f}")),
            "{f} differs"
        );
    }

    let first = arena(&["rate", "a/ttt"], dir.path());
    let second = arena(&["rate", "a/ttt/transcripts.ndjson"], dir.path());
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, read("a/ttt/leaderboard.json"));

    let json = arena(&["report", "a/ttt", "--format", "json"], dir.path());
    assert_eq!(json.stdout, read("a/ttt/metrics.json"));
    let csv = arena(&["report", "a/ttt", "--format", "csv"], dir.path());
    let table: MetricsTable = serde_json::from_slice(&json.stdout).unwrap();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(csv.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), table.agents.len());
    let headers = reader.headers().unwrap().clone();
    let col = |row: &csv::StringRecord, name: &str| {
        row[headers.iter().position(|h| h == name).unwrap()].to_owned()
    };
    for (row, a) in rows.iter().zip(&table.agents) {
        assert_eq!(col(row, "agent"), a.agent);
        assert_eq!(col(row, "matches").parse::<usize>().unwrap(), a.matches);
        assert_eq!(col(row, "wins").parse::<usize>().unwrap(), a.wins);
        let num = |name: &str| col(row, name).parse::<f64>().ok();
        assert_eq!(num("win_pct"), a.win_pct);
        assert_eq!(num("conservative"), a.conservative);
        assert_eq!(num("avg_repairs"), a.avg_repairs);
    }
}

#[test]
fn validate_and_generate() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ttt.json", BUILTIN_TTT);
    let out = arena(
        &["validate", "--config", "ttt.json", "--out", "v"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("tictactoe alpha: deployed"), "{text}");
    assert!(dir.path().join("v/ttt/validation.json").is_file());
    assert!(!dir.path().join("v/ttt/transcripts.ndjson").exists());

    let out = arena(
        &[
            "generate",
            "sudoku",
            "--seed",
            "3",
            "--per-tier",
            "2",
            "--out",
            "inst",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let files: Vec<PathBuf> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(PathBuf::from)
        .collect();
    assert_eq!(files.len(), 6);
    for f in &files {
        arena::instances::InstanceFile::load(&dir.path().join(f)).unwrap();
    }
    let out = arena(&["generate", "tictactoe", "--out", "inst"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
