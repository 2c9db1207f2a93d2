//! Seeded, deterministic agent-based simulation on the token engine.
//!
//! A [`ScenarioConfig`] describes the agents and token designs; [`run`] plays
//! it and returns the engine (with its event log) and the metrics frames;
//! [`replay`] rebuilds the frames from a log alone; [`sweep`] runs a grid of
//! scenario variants in parallel.

pub mod config;
pub mod error;
pub mod metrics;
pub mod prob;
pub mod rng;
pub mod run;
pub mod sweep;

pub use config::{agent_account, team_account, AgentGroup, AgentPolicy, BadProof, ScenarioConfig, VoteRule};
pub use error::{SimError, SimResult};
pub use metrics::{csv_string, replay, write_csv, MetricsFrame};
pub use prob::Probability;
pub use rng::SimRng;
pub use run::{run, GroundTruth, RunOutput, RunSummary};
pub use sweep::{derive_seed, sweep, Axis, Grid, SweepRow};

/// Scenario files shipped with the crate.
pub mod scenarios {
    /// A 50-participant forum with 11 tokens and every verifier kind.
    pub const FORUM2019: &str = include_str!("../scenarios/forum2019.toml");
    /// Free riders facing approvers and oracles that never err.
    pub const FREE_RIDERS: &str = include_str!("../scenarios/free_riders.toml");
}
