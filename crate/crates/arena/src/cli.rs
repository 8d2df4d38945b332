//! `arena` command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use arena_core::tournament::{leaderboard, rate_records, CandidateSummary};
use arena_core::{GameId, MatchRecord};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ConfigError, GameEntry, RunConfig};
use crate::instances::{challenge_set, tiers, InstanceFile};
use crate::launch::{agent_from_spec, LaunchSettings};
use crate::parallel::default_workers;
use crate::pipeline::{build_coders, rank, run_pipeline, validate_game, RunContext, RunOutput};
use crate::report;

#[derive(Debug, Parser)]
#[command(
    name = "arena",
    version,
    about = "Generate, validate and rank game-playing agents"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    /// Run configuration (JSON or TOML).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Parallel matches; defaults to the logical core count.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-decision timeout [default: 45].
    #[arg(long)]
    pub timeout_seconds: Option<f64>,
    #[arg(long)]
    pub run_id: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline: generate, validate, play tournaments, rate, report.
    Run(RunArgs),
    /// Generate and validate candidates only.
    Validate(RunArgs),
    /// One match between agents given as `builtin:<name>` or script paths.
    Play {
        game: String,
        #[arg(required = true)]
        agents: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 45.0)]
        timeout_seconds: f64,
        /// Interpreter command for scripts; `{source}` is the script path.
        #[arg(long, num_args = 1.., value_delimiter = ' ')]
        interpreter: Option<Vec<String>>,
        /// Run scripts without filesystem/network confinement.
        #[arg(long)]
        no_sandbox: bool,
    },
    /// Recompute ratings from a transcript file or run directory.
    Rate {
        path: PathBuf,
        /// Config for rating parameters; defaults to the run's config.json.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Regenerate leaderboard and metrics tables of a run directory.
    Report {
        run_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write challenge-set instance files for a single-player game.
    Generate {
        game: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        per_tier: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Raised for invalid configuration; exits with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: ConfigError) -> anyhow::Error {
    Usage(format!("invalid config: {e}")).into()
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run(args) => {
            let (config, ctx) = prepare(&args)?;
            let output = run_pipeline(&config, &ctx)?;
            report::write_run(&config, &output)?;
            summarize(&output);
            println!("{}", output.run_dir.display());
            Ok(())
        }
        Command::Validate(args) => {
            let (config, ctx) = prepare(&args)?;
            let mut coders = build_coders(&config, &ctx)?;
            let mut entries = Vec::new();
            for round in 0..config.rounds {
                for (index, entry) in config.games.iter().enumerate() {
                    entries.extend(validate_game(
                        &config,
                        &ctx,
                        &mut coders,
                        round,
                        index,
                        entry,
                    )?);
                }
            }
            std::fs::create_dir_all(&ctx.run_dir)?;
            std::fs::write(
                ctx.run_dir.join(report::VALIDATION),
                serde_json::to_string_pretty(&entries)? + "\n",
            )?;
            for e in &entries {
                let c = &e.candidate;
                let status = if c.is_deployed() {
                    "deployed".to_owned()
                } else {
                    "rejected".to_owned()
                };
                println!(
                    "round {} {} {}: {} after {} repair(s)",
                    e.round, c.game, c.coder, status, c.iteration
                );
            }
            Ok(())
        }
        Command::Play {
            game,
            agents,
            seed,
            timeout_seconds,
            interpreter,
            no_sandbox,
        } => {
            let record = play(
                &game,
                &agents,
                seed,
                timeout_seconds,
                interpreter,
                !no_sandbox,
            )?;
            println!("{}", serde_json::to_string(&record)?);
            Ok(())
        }
        Command::Rate { path, config } => {
            let (transcripts, config_path) = if path.is_dir() {
                (
                    path.join(report::TRANSCRIPTS),
                    config.unwrap_or_else(|| path.join(report::CONFIG_JSON)),
                )
            } else {
                let sibling = path.with_file_name(report::CONFIG_JSON);
                (path.clone(), config.unwrap_or(sibling))
            };
            let records = report::read_transcripts(&transcripts)?;
            let config = if config_path.is_file() {
                Some(RunConfig::load(&config_path).map_err(usage)?)
            } else {
                None
            };
            let params = config
                .as_ref()
                .map(|c| c.rating.params())
                .unwrap_or_default();
            let draws = config
                .iter()
                .flat_map(|c| c.games.iter())
                .filter_map(|g| g.draw_probability.map(|p| (g.game, p)))
                .collect();
            let ratings = rate_records(&records, &params, &draws)?;
            print!(
                "{}",
                report::leaderboard_json(&leaderboard(&ratings), &params)
            );
            Ok(())
        }
        Command::Report { run_dir, format } => {
            let config = RunConfig::load(&run_dir.join(report::CONFIG_JSON)).map_err(usage)?;
            let records = report::read_transcripts(&run_dir.join(report::TRANSCRIPTS))?;
            let validation_path = run_dir.join(report::VALIDATION);
            let candidates: Vec<CandidateSummary> = if validation_path.is_file() {
                report::read_validation(&validation_path)?
                    .iter()
                    .map(|v| v.summary())
                    .collect()
            } else {
                Vec::new()
            };
            let (_, board, metrics) = rank(&config, &records, &candidates)?;
            report::write_tables(&run_dir, &board, &metrics, &config.rating.params())?;
            match format {
                Format::Json => print!("{}", report::metrics_json(&metrics)),
                Format::Csv => print!("{}", report::metrics_csv(&metrics)),
            }
            Ok(())
        }
        Command::Generate {
            game,
            seed,
            per_tier,
            out,
        } => {
            let game = GameId::parse(&game).map_err(|e| Usage(e.to_string()))?;
            if !game.is_single_player() {
                return Err(Usage(format!("{game} is not a single-player game")).into());
            }
            std::fs::create_dir_all(&out)?;
            let instances = challenge_set(&tiers(&game.default_config()), per_tier, seed);
            for (k, inst) in instances.iter().enumerate() {
                let file = InstanceFile::new(inst.config, inst.seed)?;
                let path = out.join(format!("{game}-{k:03}.json"));
                std::fs::write(&path, file.to_pretty_json())?;
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

/// Loads the config, applies flag overrides and validates the result.
pub fn prepare(args: &RunArgs) -> anyhow::Result<(RunConfig, RunContext)> {
    let mut config = RunConfig::load(&args.config).map_err(usage)?;
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(r) = args.rounds {
        config.rounds = r;
    }
    if let Some(w) = args.workers {
        config.workers = Some(w);
    }
    if let Some(o) = &args.out {
        config.out = o.clone();
    }
    if let Some(t) = args.timeout_seconds {
        config.limits.timeout_seconds = t;
    }
    if let Some(id) = &args.run_id {
        config.run_id = Some(id.clone());
    }
    config.validate().map_err(usage)?;
    let base_dir = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    Ok(context(config, base_dir))
}

pub fn context(config: RunConfig, base_dir: PathBuf) -> (RunConfig, RunContext) {
    let ctx = RunContext {
        workers: config.workers.unwrap_or_else(default_workers),
        run_dir: config.out.join(config.run_id()),
        base_dir,
    };
    (config, ctx)
}

fn summarize(output: &RunOutput) {
    for note in &output.notes {
        eprintln!("note: {note}");
    }
    let rejected = output
        .validations
        .iter()
        .filter(|v| !v.candidate.is_deployed())
        .count();
    eprintln!(
        "{} matches, {} candidates ({} rejected)",
        output.records.len(),
        output.validations.len(),
        rejected
    );
    for row in &output.leaderboard.overall {
        eprintln!(
            "{:>3}  {:<20} {:>8.3}",
            row.rank, row.agent, row.conservative
        );
    }
}

/// A single match; agents are `builtin:<name>` or script paths.
pub fn play(
    game: &str,
    agents: &[String],
    seed: u64,
    timeout_seconds: f64,
    interpreter: Option<Vec<String>>,
    sandbox: bool,
) -> anyhow::Result<MatchRecord> {
    let game = GameId::parse(game).map_err(|e| Usage(e.to_string()))?;
    let mut entry = GameEntry::new(game);
    if game == GameId::Holdem && agents.len() > 2 {
        entry.seats = Some(agents.len() as u32);
    }
    let descriptor = entry.game_config().descriptor()?;
    if agents.len() != descriptor.seats {
        bail!(
            "{game} needs {} agent(s), got {}",
            descriptor.seats,
            agents.len()
        );
    }
    let mut settings = LaunchSettings {
        sandbox,
        ..LaunchSettings::default()
    };
    settings.limits.move_timeout_seconds = timeout_seconds;
    if let Some(i) = interpreter {
        settings.interpreter = i;
    }
    let scratch = tempfile::tempdir().context("creating scratch directory")?;
    let mut handles = Vec::new();
    for (seat, spec) in agents.iter().enumerate() {
        let id = format!("seat{seat}:{}", spec.rsplit('/').next().unwrap_or(spec));
        let dir = scratch.path().join(format!("seat{seat}"));
        std::fs::create_dir_all(&dir)?;
        handles.push(agent_from_spec(
            spec,
            &id,
            game,
            arena_core::seed::derive(seed, seat as u64),
            &dir,
            &settings,
        )?);
    }
    let metered = handles.iter().any(|a| a.is_metered());
    let mut seats: Vec<&mut dyn arena_core::agents::Agent> = handles
        .iter_mut()
        .map(|a| &mut **a as &mut dyn arena_core::agents::Agent)
        .collect();
    let match_id = format!("play-{game}-{seed}");
    let record = if metered {
        arena_core::engine::run_match(
            &descriptor,
            &mut seats,
            &settings.limits,
            seed,
            &match_id,
            &crate::clock::MonotonicClock::new(),
        )?
    } else {
        arena_core::engine::run_match(
            &descriptor,
            &mut seats,
            &settings.limits,
            seed,
            &match_id,
            &arena_core::clock::FrozenClock,
        )?
    };
    drop(seats);
    drop(handles);
    Ok(record)
}
