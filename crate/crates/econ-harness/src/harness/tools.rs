//! The agent-facing tool protocol: schemas, calls, and results.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// What a tool does to the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolKind {
    /// Returns information; never mutates environment state.
    Getter,
    /// Takes the period's action and advances the environment.
    Action,
    /// Reads or writes the agent's own persistent notes.
    Notes,
}

/// One declared parameter of a tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolParam {
    pub name: String,
    /// Semantic type hint ("string", "integer", ...).
    pub param_type: String,
    pub description: String,
}

impl ToolParam {
    pub fn new(name: &str, param_type: &str, description: &str) -> Self {
        Self {
            name: name.to_string(),
            param_type: param_type.to_string(),
            description: description.to_string(),
        }
    }
}

/// Declaration of one tool an agent may call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolSchema {
    pub name: String,
    pub kind: ToolKind,
    pub params: Vec<ToolParam>,
    pub description: String,
}

impl ToolSchema {
    pub fn getter(name: &str, description: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: ToolKind::Getter,
            params: Vec::new(),
            description: description.to_string(),
        }
    }

    pub fn action(name: &str, description: &str, params: Vec<ToolParam>) -> Self {
        Self {
            name: name.to_string(),
            kind: ToolKind::Action,
            params,
            description: description.to_string(),
        }
    }

    pub fn notes(name: &str, description: &str, params: Vec<ToolParam>) -> Self {
        Self {
            name: name.to_string(),
            kind: ToolKind::Notes,
            params,
            description: description.to_string(),
        }
    }
}

/// The two notes tools shared by every episodic environment.
pub fn notes_tool_schemas(period_noun: &str) -> Vec<ToolSchema> {
    vec![
        ToolSchema::notes(
            "write_notes",
            &format!("Append notes to the notes file for this {period_noun}."),
            vec![ToolParam::new(
                "notes",
                "string",
                &format!(
                    "Your notes for the current {period_noun}. Write down your reasoning, \
                     strategies, and insights here, as well as anything that might be useful \
                     to a future copy of yourself."
                ),
            )],
        ),
        ToolSchema::notes(
            "read_notes",
            &format!(
                "Read the notes you wrote during that {period_noun}. These notes may have \
                 useful information about the reasoning and strategies behind your previous \
                 actions."
            ),
            vec![ToolParam::new(
                &format!("{period_noun}_number"),
                "integer",
                &format!("The {period_noun} number to read notes from."),
            )],
        ),
    ]
}

/// One tool invocation by the agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub tool: String,
    #[serde(default)]
    pub args: Value,
}

impl ToolCall {
    pub fn new(tool: &str, args: Value) -> Self {
        Self {
            tool: tool.to_string(),
            args,
        }
    }

    /// Calls to getters that take no arguments.
    pub fn bare(tool: &str) -> Self {
        Self::new(tool, Value::Object(serde_json::Map::new()))
    }

    pub fn str_arg(&self, name: &str) -> Option<&str> {
        self.args.get(name).and_then(Value::as_str)
    }

    pub fn int_arg(&self, name: &str) -> Option<i64> {
        self.args.get(name).and_then(Value::as_i64)
    }
}

/// Outcome of one tool invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolResult {
    pub ok: bool,
    /// Rendered text shown to the agent (error text when `ok` is false).
    pub payload: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ToolResult {
    pub fn ok(payload: impl Into<String>) -> Self {
        Self {
            ok: true,
            payload: payload.into(),
            error: None,
        }
    }

    pub fn err(message: impl Into<String>) -> Self {
        let message = message.into();
        Self {
            ok: false,
            payload: message.clone(),
            error: Some(message),
        }
    }
}
