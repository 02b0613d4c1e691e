//! Deterministic harness of synthetic economic decision environments
//! (procurement, scheduling, pricing) and tradeoff litmus environments
//! (patience, efficiency vs equality, duopoly collusion).
//!
//! Every environment is generated from a 64-bit seed, carries a ground-truth
//! optimum solver for score normalization, and is driven through a small
//! tool-call protocol: an agent issues getter calls to inspect history and
//! exactly one action call per period. Agents can run in-process (see
//! [`agents`]) or as external processes speaking newline-delimited JSON
//! (see [`bridge`]).
//!
//! Start with the `examples/` directory: there is one runnable example per
//! environment family plus one for the wire protocol.

pub mod agents;
pub mod bridge;
pub mod cli;
pub mod envs;
pub mod harness;
pub mod litmus;
pub mod metrics;
pub mod numeric;
pub mod report;
pub mod rng;
pub mod textfmt;

pub use harness::{
    run_episode, Agent, AgentError, EnvKind, Environment, EpisodeConfig, PeriodRecord, Session,
    ToolCall, ToolResult, ToolSchema, Transcript,
};

/// Version stamp carried by every instance and transcript file.
pub const SCHEMA_VERSION: u32 = 1;
