use std::collections::HashSet;

use super::ast::{CallExpr, SourceLocation, Statement, StatementKind, Strategy, StrategyDoc};
use super::diagnostic::{Code, Diagnostic};

/// Static checks over a parsed document. Unknown call targets and arity
/// mismatches are errors; references with no lexically preceding definition
/// and statements after a `RETURN` are warnings.
pub fn validate(doc: &StrategyDoc) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for strategy in &doc.strategies {
        let mut defined: HashSet<String> = strategy.params.iter().cloned().collect();
        check_block(doc, strategy, &strategy.body, &mut defined, &mut diags);
    }
    diags
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

fn check_block(
    doc: &StrategyDoc,
    strategy: &Strategy,
    block: &[Statement],
    defined: &mut HashSet<String>,
    diags: &mut Vec<Diagnostic>,
) {
    let mut returned = false;
    for stmt in block {
        if returned {
            diags.push(Diagnostic::warning(
                Code::Unreachable,
                "statement follows a RETURN in the same block",
                stmt.location.clone(),
            ));
            // One warning per block is enough.
            returned = false;
        }
        if let Some(call) = stmt.kind.call() {
            check_call(doc, call, &stmt.location, diags);
        }
        for name in stmt.kind.references() {
            if !defined.contains(name) {
                diags.push(Diagnostic::warning(
                    Code::UndefinedReference,
                    format!(
                        "'{name}' is not a parameter or earlier variable of `{}`",
                        strategy.name
                    ),
                    stmt.location.clone(),
                ));
            }
        }
        match &stmt.kind {
            StatementKind::Assignment { target, .. } => {
                defined.insert(target.clone());
            }
            StatementKind::ForEach { element, block, .. } => {
                let fresh = defined.insert(element.clone());
                check_block(doc, strategy, block, defined, diags);
                if fresh {
                    defined.remove(element);
                }
            }
            StatementKind::Conditional { block, .. } | StatementKind::Until { block, .. } => {
                check_block(doc, strategy, block, defined, diags);
            }
            StatementKind::Return { .. } => returned = true,
            StatementKind::Action { .. } | StatementKind::Call(_) => {}
        }
    }
}

fn check_call(doc: &StrategyDoc, call: &CallExpr, at: &SourceLocation, diags: &mut Vec<Diagnostic>) {
    match doc.strategy(&call.target) {
        None => diags.push(Diagnostic::error(
            Code::UnknownStrategy,
            format!("no strategy named `{}`", call.target),
            at.clone(),
        )),
        Some(target) if target.params.len() != call.args.len() => {
            diags.push(Diagnostic::error(
                Code::ArityMismatch,
                format!(
                    "`{}` takes {} argument(s) but {} given",
                    call.target,
                    target.params.len(),
                    call.args.len()
                ),
                at.clone(),
            ))
        }
        Some(_) => {}
    }
}
