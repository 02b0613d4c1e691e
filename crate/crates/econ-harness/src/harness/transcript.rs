//! Episode transcripts and their JSONL persistence.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::tools::{ToolCall, ToolResult};
use super::{EnvKind, EpisodeConfig};
use crate::SCHEMA_VERSION;

/// Content hash of a JSON document (hex SHA-256 of its canonical rendering).
///
/// `serde_json` maps are key-sorted, so rendering is canonical for equal values.
pub fn digest_json(value: &Value) -> String {
    let text = serde_json::to_string(value).expect("json render");
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hex::encode(hasher.finalize())
}

/// One recorded tool invocation with its result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub call: ToolCall,
    pub result: ToolResult,
}

/// Everything that happened in one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub period_index: usize,
    pub calls: Vec<CallRecord>,
    /// Canonical form of the action that advanced the period.
    pub action: Value,
    /// Structured environment feedback for the action.
    pub feedback: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes_written: Option<String>,
    /// True when the call budget ran out and the harness advanced the period
    /// with the environment's pass action.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub forced_pass: bool,
}

/// Ordered record of a completed (or early-terminated) episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: EpisodeConfig,
    pub instance_digest: String,
    pub periods: Vec<PeriodRecord>,
    pub terminated_early: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub termination_reason: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TranscriptHeader {
    schema_version: u32,
    kind: String,
    env: EnvKind,
    config: EpisodeConfig,
    instance: Value,
    instance_digest: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct TranscriptFooter {
    kind: String,
    terminated_early: bool,
    #[serde(default)]
    termination_reason: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PeriodLine {
    kind: String,
    #[serde(flatten)]
    record: PeriodRecord,
}

/// Write a transcript as schema-versioned JSONL: header, one line per period,
/// footer.
pub fn write_transcript(
    out: &mut dyn Write,
    transcript: &Transcript,
    instance: &Value,
) -> std::io::Result<()> {
    let header = TranscriptHeader {
        schema_version: SCHEMA_VERSION,
        kind: "transcript".to_string(),
        env: transcript.config.env_kind,
        config: transcript.config.clone(),
        instance: instance.clone(),
        instance_digest: transcript.instance_digest.clone(),
    };
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    for record in &transcript.periods {
        let line = PeriodLine {
            kind: "period".to_string(),
            record: record.clone(),
        };
        writeln!(out, "{}", serde_json::to_string(&line)?)?;
    }
    let footer = TranscriptFooter {
        kind: "end".to_string(),
        terminated_early: transcript.terminated_early,
        termination_reason: transcript.termination_reason.clone(),
    };
    writeln!(out, "{}", serde_json::to_string(&footer)?)
}

/// Serialize a transcript to bytes (used for byte-identity checks).
pub fn transcript_to_bytes(transcript: &Transcript, instance: &Value) -> Vec<u8> {
    let mut buf = Vec::new();
    write_transcript(&mut buf, transcript, instance).expect("in-memory write");
    buf
}

/// Read back a transcript written by [`write_transcript`].
///
/// Returns the transcript together with the embedded instance document.
pub fn read_transcript(reader: impl BufRead) -> Result<(Transcript, Value), String> {
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or("empty transcript file")?
        .map_err(|e| e.to_string())?;
    let header: TranscriptHeader =
        serde_json::from_str(&header_line).map_err(|e| format!("bad transcript header: {e}"))?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "schema version mismatch: file has {}, this build reads {}",
            header.schema_version, SCHEMA_VERSION
        ));
    }
    let expected_digest = digest_json(&header.instance);
    if expected_digest != header.instance_digest {
        return Err("instance digest does not match embedded instance".to_string());
    }

    let mut periods = Vec::new();
    let mut footer: Option<TranscriptFooter> = None;
    for line in lines {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(&line).map_err(|e| format!("bad transcript line: {e}"))?;
        match value.get("kind").and_then(Value::as_str) {
            Some("period") => {
                let line: PeriodLine = serde_json::from_value(value).map_err(|e| e.to_string())?;
                periods.push(line.record);
            }
            Some("end") => {
                footer = Some(serde_json::from_value(value).map_err(|e| e.to_string())?);
            }
            other => return Err(format!("unexpected transcript line kind {other:?}")),
        }
    }
    let footer = footer.ok_or("transcript missing end line")?;
    Ok((
        Transcript {
            config: header.config,
            instance_digest: header.instance_digest,
            periods,
            terminated_early: footer.terminated_early,
            termination_reason: footer.termination_reason,
        },
        header.instance,
    ))
}
