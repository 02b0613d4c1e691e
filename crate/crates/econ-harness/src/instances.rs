//! Instance files: one JSON document per generated world, schema-versioned.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::envs::pricing::PricingInstance;
use crate::envs::procurement::ProcurementInstance;
use crate::envs::scheduling::SchedulingInstance;
use crate::harness::{EnvKind, Environment};
use crate::litmus::allocation::AllocInstance;
use crate::litmus::collusion::DuopolyInstance;
use crate::SCHEMA_VERSION;

/// A generated instance of any environment family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "env", rename_all = "snake_case")]
pub enum AnyInstance {
    Procurement(ProcurementInstance),
    Scheduling(SchedulingInstance),
    Pricing(PricingInstance),
    AllocLitmus(AllocInstance),
    DuopolyLitmus(DuopolyInstance),
}

impl AnyInstance {
    pub fn kind(&self) -> EnvKind {
        match self {
            AnyInstance::Procurement(_) => EnvKind::Procurement,
            AnyInstance::Scheduling(_) => EnvKind::Scheduling,
            AnyInstance::Pricing(_) => EnvKind::Pricing,
            AnyInstance::AllocLitmus(_) => EnvKind::AllocLitmus,
            AnyInstance::DuopolyLitmus(_) => EnvKind::DuopolyLitmus,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            AnyInstance::Procurement(i) => i.seed,
            AnyInstance::Scheduling(i) => i.seed,
            AnyInstance::Pricing(i) => i.seed,
            AnyInstance::AllocLitmus(i) => i.seed,
            AnyInstance::DuopolyLitmus(i) => i.seed,
        }
    }

    /// The instance document as embedded in transcripts (untagged form).
    pub fn payload_json(&self) -> Value {
        match self {
            AnyInstance::Procurement(i) => serde_json::to_value(i),
            AnyInstance::Scheduling(i) => serde_json::to_value(i),
            AnyInstance::Pricing(i) => serde_json::to_value(i),
            AnyInstance::AllocLitmus(i) => serde_json::to_value(i),
            AnyInstance::DuopolyLitmus(i) => serde_json::to_value(i),
        }
        .expect("serialize instance")
    }

    /// Reconstruct from a transcript's embedded instance document.
    pub fn from_payload(kind: EnvKind, payload: Value) -> Result<AnyInstance, String> {
        let wrap = |e: serde_json::Error| format!("bad {} instance: {e}", kind.as_str());
        Ok(match kind {
            EnvKind::Procurement => {
                AnyInstance::Procurement(serde_json::from_value(payload).map_err(wrap)?)
            }
            EnvKind::Scheduling => {
                AnyInstance::Scheduling(serde_json::from_value(payload).map_err(wrap)?)
            }
            EnvKind::Pricing => AnyInstance::Pricing(serde_json::from_value(payload).map_err(wrap)?),
            EnvKind::AllocLitmus => {
                AnyInstance::AllocLitmus(serde_json::from_value(payload).map_err(wrap)?)
            }
            EnvKind::DuopolyLitmus => {
                AnyInstance::DuopolyLitmus(serde_json::from_value(payload).map_err(wrap)?)
            }
        })
    }

    /// Build the single-agent environment for this instance. Two-agent
    /// duopoly episodes run through their own loop and are rejected here.
    pub fn make_env(&self) -> Result<Box<dyn Environment>, String> {
        Ok(match self.clone() {
            AnyInstance::Procurement(i) => {
                Box::new(crate::envs::procurement::ProcurementEnv::new(i))
            }
            AnyInstance::Scheduling(i) => Box::new(crate::envs::scheduling::SchedulingEnv::new(i)),
            AnyInstance::Pricing(i) => Box::new(crate::envs::pricing::PricingEnv::new(i)),
            AnyInstance::AllocLitmus(i) => Box::new(crate::litmus::allocation::AllocEnv::new(i)),
            AnyInstance::DuopolyLitmus(i) if i.monopoly => {
                Box::new(crate::litmus::collusion::MonopolyEnv::new(i))
            }
            AnyInstance::DuopolyLitmus(_) => {
                return Err(
                    "two-agent duopoly instances run through the duopoly episode loop".to_string(),
                )
            }
        })
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    schema_version: u32,
    #[serde(flatten)]
    instance: AnyInstance,
}

/// Write an instance file (single JSON object).
pub fn write_instance(out: &mut dyn Write, instance: &AnyInstance) -> std::io::Result<()> {
    let file = InstanceFile {
        schema_version: SCHEMA_VERSION,
        instance: instance.clone(),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&file)?)
}

/// Read an instance file, refusing schema-version mismatches.
pub fn read_instance(reader: impl BufRead) -> Result<AnyInstance, String> {
    let value: Value = serde_json::from_reader(reader).map_err(|e| format!("bad instance file: {e}"))?;
    let version = value.get("schema_version").and_then(Value::as_u64);
    if version != Some(SCHEMA_VERSION as u64) {
        return Err(format!(
            "schema version mismatch: file has {version:?}, this build reads {SCHEMA_VERSION}"
        ));
    }
    let file: InstanceFile =
        serde_json::from_value(value).map_err(|e| format!("bad instance file: {e}"))?;
    Ok(file.instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::scheduling::{generate_instance, GenMethod};
    use crate::envs::Difficulty;

    #[test]
    fn instance_file_round_trip() {
        let instance =
            AnyInstance::Scheduling(generate_instance(Difficulty::Basic, GenMethod::Uniform, 9));
        let mut buf = Vec::new();
        write_instance(&mut buf, &instance).unwrap();
        let back = read_instance(std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(instance, back);
    }

    #[test]
    fn version_mismatch_is_refused() {
        let text = r#"{"schema_version": 999, "env": "scheduling"}"#;
        let err = read_instance(std::io::BufReader::new(text.as_bytes())).unwrap_err();
        assert!(err.contains("schema version mismatch"));
    }
}
