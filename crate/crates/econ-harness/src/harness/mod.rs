//! Episode state machine and tool-use protocol.
//!
//! An episode pairs one environment instance with one agent for a fixed
//! number of periods. Each period the agent issues tool calls against a
//! [`Session`]; getter and notes calls never mutate the environment, and the
//! period advances when exactly one action call succeeds. Agents that exhaust
//! the per-period call budget are force-advanced with the environment's pass
//! action (resubmit the last action, or a canonical default when none exists).

mod notes;
mod tools;
mod transcript;

pub mod pydict;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use notes::NotesStore;
pub use tools::{notes_tool_schemas, ToolCall, ToolKind, ToolParam, ToolResult, ToolSchema};
pub use transcript::{
    digest_json, read_transcript, transcript_to_bytes, write_transcript, CallRecord, PeriodRecord,
    Transcript,
};

/// Default per-period tool call budget. The underlying decision problems never
/// need anywhere near this many calls, but an unbounded loop must not hang an
/// episode.
pub const DEFAULT_CALL_BUDGET: usize = 50;

/// Environment family of an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Procurement,
    Scheduling,
    Pricing,
    AllocLitmus,
    DuopolyLitmus,
}

impl EnvKind {
    /// Episode length used by the corresponding experiments.
    pub fn default_periods(self) -> usize {
        match self {
            EnvKind::Procurement | EnvKind::Scheduling | EnvKind::Pricing => 100,
            EnvKind::AllocLitmus => 30,
            EnvKind::DuopolyLitmus => 300,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnvKind::Procurement => "procurement",
            EnvKind::Scheduling => "scheduling",
            EnvKind::Pricing => "pricing",
            EnvKind::AllocLitmus => "alloc_litmus",
            EnvKind::DuopolyLitmus => "duopoly_litmus",
        }
    }
}

/// Static description of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub env_kind: EnvKind,
    pub num_periods: usize,
    pub instance_seed: u64,
    /// Local baseline name or bridge endpoint, recorded for provenance.
    pub agent_binding: String,
    #[serde(default = "default_call_budget")]
    pub call_budget: usize,
}

fn default_call_budget() -> usize {
    DEFAULT_CALL_BUDGET
}

impl EpisodeConfig {
    pub fn new(env_kind: EnvKind, instance_seed: u64, agent_binding: &str) -> Self {
        Self {
            env_kind,
            num_periods: env_kind.default_periods(),
            instance_seed,
            agent_binding: agent_binding.to_string(),
            call_budget: DEFAULT_CALL_BUDGET,
        }
    }

    pub fn with_periods(mut self, num_periods: usize) -> Self {
        assert!(num_periods >= 1, "num_periods must be at least 1");
        self.num_periods = num_periods;
        self
    }
}

/// Result of a successful action call.
#[derive(Debug, Clone)]
pub struct ActionOutcome {
    /// Canonical form of the action taken.
    pub action: Value,
    /// Structured feedback value recorded in the transcript.
    pub feedback: Value,
    /// Acknowledgement text returned to the agent for the action call itself.
    pub ack: String,
    /// True when the environment defines this outcome as terminal
    /// (a stable matching ends a scheduling episode).
    pub terminal: bool,
}

/// An episodic decision environment.
///
/// Implementations keep the generated instance immutable; only action calls
/// may mutate per-episode history, which keeps getters pure by construction.
pub trait Environment {
    fn kind(&self) -> EnvKind;

    /// Seed the instance was generated from.
    fn instance_seed(&self) -> u64;

    /// Full instance document (embedded in transcript files).
    fn instance_json(&self) -> Value;

    /// Environment-specific tools, action tool last. Notes tools are appended
    /// by the session.
    fn tool_schemas(&self) -> Vec<ToolSchema>;

    fn system_text(&self) -> String;

    /// Initial message for a period (the final scheduling period appends the
    /// final-attempt instruction).
    fn initial_text(&self, period: usize, num_periods: usize) -> String;

    /// Name of the action tool.
    fn action_tool(&self) -> &'static str;

    /// Noun used by the notes/index tools: "attempt" or "period".
    fn period_noun(&self) -> &'static str {
        "attempt"
    }

    /// Handle a getter call. `Err` is returned to the agent as a failed call.
    fn call_getter(&self, tool: &str, call: &ToolCall) -> Result<String, String>;

    /// Validate and apply the period action. `Err` is returned to the agent
    /// and the period is not consumed.
    fn submit_action(&mut self, call: &ToolCall) -> Result<ActionOutcome, String>;

    /// The action recorded when the agent never takes one: resubmit the last
    /// action when one exists, otherwise a canonical default.
    fn pass_action(&mut self) -> ActionOutcome;

    /// Digest of instance plus mutable history; fixed under getter calls.
    fn state_digest(&self) -> String;
}

/// Agent-side view of one period.
pub trait Session {
    fn tools(&self) -> &[ToolSchema];
    fn system_text(&self) -> &str;
    fn initial_text(&self) -> &str;
    fn call(&mut self, call: ToolCall) -> ToolResult;
    /// True once the period's action has been accepted.
    fn action_taken(&self) -> bool;
}

/// Why an agent could not finish its turn.
#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("bridge disconnected: {0}")]
    BridgeDisconnect(String),
    #[error("agent failed: {0}")]
    Fatal(String),
}

/// A decision-making agent driven one period at a time.
///
/// `act` should issue tool calls against the session until its action call
/// succeeds, then return. Returning without a successful action forfeits the
/// period to the environment's pass action.
pub trait Agent {
    fn act(&mut self, session: &mut dyn Session) -> Result<(), AgentError>;
}

/// In-process session: dispatches calls to the environment and records them.
pub struct EpisodeSession<'a> {
    env: &'a mut dyn Environment,
    notes: &'a mut NotesStore,
    tools: Vec<ToolSchema>,
    system_text: String,
    initial_text: String,
    period: usize,
    call_budget: usize,
    calls: Vec<CallRecord>,
    outcome: Option<ActionOutcome>,
}

impl<'a> EpisodeSession<'a> {
    pub fn new(
        env: &'a mut dyn Environment,
        notes: &'a mut NotesStore,
        period: usize,
        num_periods: usize,
        call_budget: usize,
    ) -> Self {
        let mut tools = env.tool_schemas();
        let action_idx = tools.iter().position(|t| t.name == env.action_tool());
        // Notes tools sit between the getters and the final action tool.
        let notes_tools = notes_tool_schemas(env.period_noun());
        match action_idx {
            Some(idx) => {
                for (offset, tool) in notes_tools.into_iter().enumerate() {
                    tools.insert(idx + offset, tool);
                }
            }
            None => tools.extend(notes_tools),
        }
        let system_text = env.system_text();
        let initial_text = env.initial_text(period, num_periods);
        Self {
            env,
            notes,
            tools,
            system_text,
            initial_text,
            period,
            call_budget,
            calls: Vec::new(),
            outcome: None,
        }
    }

    pub fn finish(self) -> (Vec<CallRecord>, Option<ActionOutcome>) {
        (self.calls, self.outcome)
    }

    pub fn calls_made(&self) -> usize {
        self.calls.len()
    }

    fn dispatch(&mut self, call: &ToolCall) -> ToolResult {
        if self.calls.len() >= self.call_budget {
            return ToolResult::err(format!(
                "per-period call budget of {} exhausted; the period will be advanced \
                 automatically",
                self.call_budget
            ));
        }
        if self.outcome.is_some() {
            return ToolResult::err("the action for this period was already taken");
        }
        let known = self.tools.iter().any(|t| t.name == call.tool);
        if !known {
            return ToolResult::err(format!("unknown tool '{}'", call.tool));
        }
        match call.tool.as_str() {
            "write_notes" => match call.str_arg("notes") {
                Some(text) => {
                    self.notes.write(self.period, text);
                    ToolResult::ok("Successfully wrote notes.")
                }
                None => ToolResult::err("write_notes requires a 'notes' string argument"),
            },
            "read_notes" => {
                let index = call
                    .int_arg("attempt_number")
                    .or_else(|| call.int_arg("period_number"));
                match index {
                    Some(idx) if idx >= 0 => match self.notes.read(idx as usize, self.period) {
                        Ok(Some(text)) => ToolResult::ok(text),
                        Ok(None) => ToolResult::ok(format!(
                            "No notes were written for {} {idx}.",
                            self.env.period_noun()
                        )),
                        Err(message) => ToolResult::err(message),
                    },
                    _ => ToolResult::err(format!(
                        "read_notes requires a non-negative '{}_number' integer argument",
                        self.env.period_noun()
                    )),
                }
            }
            "get_attempt_number" | "get_period_number" => ToolResult::ok(self.period.to_string()),
            name if name == self.env.action_tool() => match self.env.submit_action(call) {
                Ok(outcome) => {
                    let ack = outcome.ack.clone();
                    self.outcome = Some(outcome);
                    ToolResult::ok(ack)
                }
                Err(message) => ToolResult::err(message),
            },
            name => match self.env.call_getter(name, call) {
                Ok(payload) => ToolResult::ok(payload),
                Err(message) => ToolResult::err(message),
            },
        }
    }
}

impl Session for EpisodeSession<'_> {
    fn tools(&self) -> &[ToolSchema] {
        &self.tools
    }

    fn system_text(&self) -> &str {
        &self.system_text
    }

    fn initial_text(&self) -> &str {
        &self.initial_text
    }

    fn call(&mut self, call: ToolCall) -> ToolResult {
        let result = self.dispatch(&call);
        self.calls.push(CallRecord {
            call,
            result: result.clone(),
        });
        result
    }

    fn action_taken(&self) -> bool {
        self.outcome.is_some()
    }
}

/// Run one episode to completion.
///
/// The environment must have been generated from `config.instance_seed`; the
/// resulting transcript is a pure function of (instance, agent decisions).
pub fn run_episode(
    config: &EpisodeConfig,
    env: &mut dyn Environment,
    agent: &mut dyn Agent,
) -> Transcript {
    assert_eq!(config.env_kind, env.kind(), "config/environment mismatch");
    assert_eq!(
        config.instance_seed,
        env.instance_seed(),
        "config seed does not match instance seed"
    );
    assert!(config.num_periods >= 1);

    let instance_digest = digest_json(&env.instance_json());
    let mut notes = NotesStore::new();
    let mut periods = Vec::with_capacity(config.num_periods);
    let mut terminated_early = false;
    let mut termination_reason = None;

    for period in 0..config.num_periods {
        let mut session =
            EpisodeSession::new(env, &mut notes, period, config.num_periods, config.call_budget);
        let agent_result = agent.act(&mut session);
        let (calls, outcome) = session.finish();

        if let Err(AgentError::BridgeDisconnect(reason)) = &agent_result {
            // No action arrived; do not consume the period.
            periods.push(PeriodRecord {
                period_index: period,
                calls,
                action: Value::Null,
                feedback: Value::Null,
                notes_written: notes.for_period(period),
                forced_pass: false,
            });
            terminated_early = true;
            termination_reason = Some(format!("bridge disconnect: {reason}"));
            break;
        }

        let (outcome, forced_pass) = match outcome {
            Some(outcome) => (outcome, false),
            None => (env.pass_action(), true),
        };
        let terminal = outcome.terminal;
        periods.push(PeriodRecord {
            period_index: period,
            calls,
            action: outcome.action,
            feedback: outcome.feedback,
            notes_written: notes.for_period(period),
            forced_pass,
        });

        if terminal {
            if period + 1 < config.num_periods {
                terminated_early = true;
                termination_reason = Some("stable".to_string());
            }
            break;
        }
        if let Err(AgentError::Fatal(reason)) = agent_result {
            terminated_early = true;
            termination_reason = Some(format!("agent failure: {reason}"));
            break;
        }
    }

    Transcript {
        config: config.clone(),
        instance_digest,
        periods,
        terminated_early,
        termination_reason,
    }
}
