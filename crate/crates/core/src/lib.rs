//! Roboto: a semi-formal language for explicit programming strategies.
//!
//! [`syntax`] turns `.roboto` source into a [`StrategyDoc`], checks it and
//! prints it back in canonical form. [`engine`] executes a document as a
//! collaboration: the developer answers queries and makes decisions, the
//! engine owns control flow, variables and the undo history. [`catalog`]
//! stores strategy files on disk next to the built-in [`corpus`].

pub mod catalog;
pub mod corpus;
pub mod engine;
pub mod syntax;

pub use catalog::{Catalog, CatalogEntry, CatalogError};
pub use engine::{
    run_scripted, EngineError, Event, EventPayload, ExecutionState, Frame, HumanInput, InputKind,
    PendingInput, ResponsibilityStep, Actor, StateView, Status, Trace, TraceEntry, Value,
};
pub use syntax::{
    format, parse, parse_file, validate, Diagnostic, Severity, SourceLocation, Statement,
    StatementKind, Strategy, StrategyDoc,
};
