//! Mixed-initiative execution: the developer performs actions, answers
//! queries and decides conditions; the engine owns the program counter,
//! the call stack, variable bindings and the undo history.

mod error;
mod responsibility;
mod script;
mod snapshot;
mod state;
mod value;
mod view;

pub use error::EngineError;
pub use responsibility::{responsibilities_for, Actor, ResponsibilityStep};
pub use script::{run_scripted, ScriptFailure, Trace, TraceEntry};
pub use snapshot::{doc_hash, SNAPSHOT_VERSION};
pub use state::{
    Event, EventPayload, ExecutionState, Frame, InputKind, LoopCursor, Machine, Observation,
    PendingInput, ReturnSlot, Status, MAX_STACK_DEPTH,
};
pub use value::{HumanInput, Value};
pub use view::{StateView, StatementView, StatusView, VariableView};
