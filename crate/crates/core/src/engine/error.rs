use thiserror::Error;

use crate::syntax::Diagnostic;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("no strategy named `{0}`")]
    UnknownStrategy(String),
    #[error("`{strategy}` expects arguments ({}) but got ({})", expected.join(", "), got.join(", "))]
    ArityMismatch {
        strategy: String,
        expected: Vec<String>,
        got: Vec<String>,
    },
    #[error("document has {} validation error(s)", .0.len())]
    ValidationFailed(Vec<Diagnostic>),
    #[error("expected {expected} input, got {got}")]
    InputKindMismatch { expected: String, got: String },
    #[error("statement needs {0} input")]
    MissingInput(String),
    #[error("the strategy has completed")]
    SessionCompleted,
    #[error("already at the first step")]
    AtStart,
    #[error("no visible variable named '{0}'")]
    UnknownOrHiddenVariable(String),
    #[error("'{name}' drives an active loop; its first {consumed} element(s) are locked")]
    LoopElementLocked { name: String, consumed: usize },
    #[error("sub-strategy calls nested deeper than {0} frames")]
    StackOverflow(usize),
    #[error("script ran out of inputs at step {0}")]
    ScriptExhausted(usize),
    #[error("script step {step}: expected {expected} input, got {got}")]
    ScriptKindMismatch {
        step: usize,
        expected: String,
        got: String,
    },
    #[error("snapshot format version {found} is not supported (expected {expected})")]
    FormatVersionMismatch { found: u32, expected: u32 },
    #[error("corrupt snapshot: {0}")]
    CorruptPayload(String),
    #[error("snapshot was taken against a different strategy document")]
    DocMismatch,
    #[error("event log cannot be replayed: {0}")]
    CorruptEventLog(String),
}

impl EngineError {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::UnknownStrategy(_) => "UnknownStrategy",
            EngineError::ArityMismatch { .. } => "ArityMismatch",
            EngineError::ValidationFailed(_) => "ValidationFailed",
            EngineError::InputKindMismatch { .. } => "InputKindMismatch",
            EngineError::MissingInput(_) => "MissingInput",
            EngineError::SessionCompleted => "SessionCompleted",
            EngineError::AtStart => "AtStart",
            EngineError::UnknownOrHiddenVariable(_) => "UnknownOrHiddenVariable",
            EngineError::LoopElementLocked { .. } => "LoopElementLocked",
            EngineError::StackOverflow(_) => "StackOverflow",
            EngineError::ScriptExhausted(_) => "ScriptExhausted",
            EngineError::ScriptKindMismatch { .. } => "ScriptKindMismatch",
            EngineError::FormatVersionMismatch { .. } => "FormatVersionMismatch",
            EngineError::CorruptPayload(_) => "CorruptPayload",
            EngineError::DocMismatch => "DocMismatch",
            EngineError::CorruptEventLog(_) => "CorruptEventLog",
        }
    }
}
