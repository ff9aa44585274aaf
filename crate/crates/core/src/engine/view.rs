use serde::Serialize;
use serde_json::Value as Json;

use super::responsibility::ResponsibilityStep;
use super::state::{ExecutionState, PendingInput, Status};
use crate::syntax::{render_statement_line, Kind, SourceLocation, Statement};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StatementView {
    pub strategy: String,
    pub location: SourceLocation,
    /// Nesting level inside the strategy body, starting at 1.
    pub depth: usize,
    pub kind: Kind,
    pub text: String,
    pub comment: Vec<String>,
    pub current: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableView {
    pub name: String,
    pub value: Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatusView {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Json>,
}

/// Everything a client needs to render a session.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StateView {
    pub root: String,
    pub params: Vec<String>,
    pub intro_text: String,
    pub statements: Vec<StatementView>,
    pub current_strategy: Option<String>,
    pub current_location: Option<SourceLocation>,
    pub pending_input: Option<PendingInput>,
    pub visible_variables: Vec<VariableView>,
    pub responsibility_steps: Vec<ResponsibilityStep>,
    pub can_step_back: bool,
    pub stack_depth: usize,
    pub status: StatusView,
    pub last_ordinal: u64,
}

impl ExecutionState {
    pub fn view(&self) -> StateView {
        let current = self.current().map(|(s, stmt)| (s.name.clone(), stmt.location.clone()));
        let mut statements = Vec::new();
        for strategy in &self.doc().strategies {
            flatten(&strategy.name, &strategy.body, 1, current.as_ref(), &mut statements);
        }
        let root = self.doc().strategy(self.root()).expect("root exists");
        let status = match self.status() {
            Status::AwaitingInput(_) => StatusView {
                kind: "AwaitingInput",
                value: None,
            },
            Status::ReadyToAdvance => StatusView {
                kind: "ReadyToAdvance",
                value: None,
            },
            Status::Completed(v) => StatusView {
                kind: "Completed",
                value: Some(v.to_wire()),
            },
        };
        StateView {
            root: root.name.clone(),
            params: root.params.clone(),
            intro_text: root.intro_text(),
            statements,
            current_strategy: current.as_ref().map(|(s, _)| s.clone()),
            current_location: current.map(|(_, l)| l),
            pending_input: self.pending_input(),
            visible_variables: self
                .visible_variables()
                .into_iter()
                .map(|(name, v)| VariableView {
                    name,
                    value: v.to_wire(),
                })
                .collect(),
            responsibility_steps: self.responsibility_steps().unwrap_or_default(),
            can_step_back: self.can_step_back(),
            stack_depth: self.depth(),
            status,
            last_ordinal: self.last_ordinal(),
        }
    }
}

fn flatten(
    strategy: &str,
    block: &[Statement],
    depth: usize,
    current: Option<&(String, SourceLocation)>,
    out: &mut Vec<StatementView>,
) {
    for stmt in block {
        let is_current =
            current.is_some_and(|(s, loc)| s == strategy && *loc == stmt.location);
        out.push(StatementView {
            strategy: strategy.to_string(),
            location: stmt.location.clone(),
            depth,
            kind: stmt.kind.kind(),
            text: render_statement_line(&stmt.kind),
            comment: stmt.comment.clone(),
            current: is_current,
        });
        if let Some(inner) = stmt.kind.block() {
            flatten(strategy, inner, depth + 1, current, out);
        }
    }
}
