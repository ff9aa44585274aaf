//! Versioned JSON snapshot of an execution state.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::error::EngineError;
use super::state::{Event, ExecutionState, Frame, Machine, Status};
use crate::syntax::{format, StrategyDoc};

pub const SNAPSHOT_VERSION: u32 = 1;

/// SHA-256 of the canonical formatting of `doc`, hex encoded.
pub fn doc_hash(doc: &StrategyDoc) -> String {
    hex::encode(Sha256::digest(format(doc).as_bytes()))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Snapshot {
    version: u32,
    doc_hash: String,
    root: String,
    stack: Vec<Frame>,
    status: Status,
    checkpoint: Machine,
    history: Vec<Machine>,
    event_log: Vec<Event>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

impl ExecutionState {
    pub fn to_snapshot(&self) -> Vec<u8> {
        let snapshot = Snapshot {
            version: SNAPSHOT_VERSION,
            doc_hash: doc_hash(&self.doc),
            root: self.root.clone(),
            stack: self.machine.stack.clone(),
            status: self.status(),
            checkpoint: self.checkpoint.clone(),
            history: self.history.clone(),
            event_log: self.events.clone(),
        };
        serde_json::to_vec(&snapshot).expect("snapshot serializes")
    }

    /// Restores a state written by [`ExecutionState::to_snapshot`] for the
    /// same document.
    pub fn from_snapshot(bytes: &[u8], doc: Arc<StrategyDoc>) -> Result<Self, EngineError> {
        let corrupt = |e: serde_json::Error| EngineError::CorruptPayload(e.to_string());
        let probe: VersionProbe = serde_json::from_slice(bytes).map_err(corrupt)?;
        if probe.version != SNAPSHOT_VERSION {
            return Err(EngineError::FormatVersionMismatch {
                found: probe.version,
                expected: SNAPSHOT_VERSION,
            });
        }
        let snap: Snapshot = serde_json::from_slice(bytes).map_err(corrupt)?;
        if snap.doc_hash != doc_hash(&doc) {
            return Err(EngineError::DocMismatch);
        }
        for machine in snap.history.iter().chain([&snap.checkpoint]) {
            check_machine(&doc, machine)?;
        }
        let completed = match &snap.status {
            Status::Completed(v) => Some(v.clone()),
            _ => None,
        };
        let machine = Machine {
            stack: snap.stack,
            completed,
        };
        check_machine(&doc, &machine)?;
        let state = Self {
            doc,
            root: snap.root,
            machine,
            checkpoint: snap.checkpoint,
            history: snap.history,
            events: snap.event_log,
        };
        if state.status() != snap.status {
            return Err(EngineError::CorruptPayload(
                "status does not match the stored stack".into(),
            ));
        }
        Ok(state)
    }
}

fn check_machine(doc: &StrategyDoc, machine: &Machine) -> Result<(), EngineError> {
    if machine.stack.is_empty() {
        return Err(EngineError::CorruptPayload("empty stack".into()));
    }
    for frame in &machine.stack {
        let strategy = doc.strategy(&frame.strategy).ok_or_else(|| {
            EngineError::CorruptPayload(format!("unknown strategy `{}`", frame.strategy))
        })?;
        let paths = std::iter::once(&frame.pc).chain(frame.loops.iter().map(|c| &c.head));
        for path in paths {
            if strategy.statement_at(path).is_none() {
                return Err(EngineError::CorruptPayload(format!(
                    "no statement at {path:?} in `{}`",
                    frame.strategy
                )));
            }
        }
    }
    Ok(())
}
