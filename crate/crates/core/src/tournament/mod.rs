//! Match scheduling, the withdrawal policy, sequential execution, rating
//! of transcripts, metric aggregation and leaderboards.

mod execute;
mod leaderboard;
mod metrics;
mod passk;
mod schedule;

pub use execute::{execute, Withdrawals, WITHDRAWAL_THRESHOLD};
pub use leaderboard::{
    leaderboard, rate_records, GameBoard, Leaderboard, OverallRow, RankedEntry, Ratings,
};
pub use metrics::{
    aggregate, static_metrics, AgentMetrics, CandidateSummary, DrawPolicy, MetricsTable,
    StaticMetrics,
};
pub use passk::{pass_at_k, pass_at_k_exact, PassAtKError};
pub use schedule::{
    schedule_challenge_set, schedule_multiplayer, schedule_round_robin, Instance, MultiplayerKind,
    Schedule, ScheduleError, ScheduleKind, ScheduledMatch, SwissPlanner,
};
