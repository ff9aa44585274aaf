use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::error::EngineError;
use super::state::{ExecutionState, Status};
use super::value::{HumanInput, Value};
use crate::syntax::{Kind, SourceLocation, StrategyDoc};

/// One forward transition of a scripted run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEntry {
    pub location: SourceLocation,
    pub kind: Kind,
    /// `None` for statements that advance without developer input.
    pub input: Option<HumanInput>,
    /// Stack depth while the statement executed.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    pub status: Status,
}

impl Trace {
    pub fn count(&self, pred: impl Fn(&TraceEntry) -> bool) -> usize {
        self.entries.iter().filter(|e| pred(e)).count()
    }

    pub fn max_depth(&self) -> usize {
        self.entries.iter().map(|e| e.depth).max().unwrap_or(0)
    }

    pub fn completed_value(&self) -> Option<&Value> {
        match &self.status {
            Status::Completed(v) => Some(v),
            _ => None,
        }
    }
}

/// A run that stopped before completion, with everything executed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptFailure {
    pub error: EngineError,
    pub trace: Trace,
}

/// Drives a strategy to completion from a fixed list of inputs. Statements
/// that need no input advance without consuming from the script.
#[allow(clippy::result_large_err)]
pub fn run_scripted(
    doc: Arc<StrategyDoc>,
    root: &str,
    args: BTreeMap<String, Value>,
    script: &[HumanInput],
) -> Result<Trace, ScriptFailure> {
    let mut state = ExecutionState::start(doc, root, args).map_err(|error| ScriptFailure {
        error,
        trace: Trace {
            entries: Vec::new(),
            status: Status::ReadyToAdvance,
        },
    })?;
    let mut entries = Vec::new();
    let mut inputs = script.iter();
    let fail = |error, entries, state: &ExecutionState| ScriptFailure {
        error,
        trace: Trace {
            entries,
            status: state.status(),
        },
    };
    loop {
        let status = state.status();
        let input = match &status {
            Status::Completed(_) => {
                return Ok(Trace { entries, status });
            }
            Status::ReadyToAdvance => None,
            Status::AwaitingInput(pending) => {
                let Some(input) = inputs.next() else {
                    let step = entries.len();
                    return Err(fail(EngineError::ScriptExhausted(step), entries, &state));
                };
                if !pending.kind.accepts(input) {
                    let err = EngineError::ScriptKindMismatch {
                        step: entries.len(),
                        expected: pending.kind.to_string(),
                        got: input.kind_name().into(),
                    };
                    return Err(fail(err, entries, &state));
                }
                Some(input.clone())
            }
        };
        let (_, stmt) = state.current().expect("not completed");
        let entry = TraceEntry {
            location: stmt.location.clone(),
            kind: stmt.kind.kind(),
            input: input.clone(),
            depth: state.depth(),
        };
        if let Err(error) = state.next(input) {
            return Err(fail(error, entries, &state));
        }
        entries.push(entry);
    }
}
