//! A direct recursive interpreter: no program counter, no history, just
//! nested calls over the AST. Inputs come either from a fixed script or
//! from a responder that is asked what it wants to supply.

use std::collections::HashMap;

use roboto_core::engine::{HumanInput, Value};
use roboto_core::syntax::{CallExpr, Kind, SourceLocation, Statement, StatementKind, StrategyDoc};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub location: SourceLocation,
    pub kind: Kind,
    pub input: Option<HumanInput>,
    pub depth: usize,
}

/// What the interpreter needs next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Want {
    Decision { until: bool },
    Answer,
    Ack,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Completed(Value),
    Exhausted,
    KindMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefTrace {
    pub steps: Vec<Step>,
    pub outcome: Outcome,
    /// Every input consumed, in order.
    pub script: Vec<HumanInput>,
}

enum Stop {
    Exhausted,
    KindMismatch,
}

enum Flow {
    Normal,
    Return(Value),
}

struct Interp<'a> {
    doc: &'a StrategyDoc,
    source: &'a mut dyn FnMut(Want) -> Option<HumanInput>,
    steps: Vec<Step>,
    consumed: Vec<HumanInput>,
    last: Option<HumanInput>,
}

type Env = HashMap<String, Value>;

fn items(v: Option<&Value>) -> Vec<String> {
    match v {
        Some(Value::Text(t)) => vec![t.clone()],
        Some(Value::List(l)) => l.clone(),
        _ => Vec::new(),
    }
}

/// Runs `root` consuming `script` in order.
pub fn run(doc: &StrategyDoc, root: &str, args: &[(String, Value)], script: &[HumanInput]) -> RefTrace {
    let mut inputs = script.iter().cloned();
    run_with(doc, root, args, &mut |_| inputs.next())
}

/// Runs `root` asking `source` for each input; `None` stops the run.
pub fn run_with(
    doc: &StrategyDoc,
    root: &str,
    args: &[(String, Value)],
    source: &mut dyn FnMut(Want) -> Option<HumanInput>,
) -> RefTrace {
    let mut interp = Interp {
        doc,
        source,
        steps: Vec::new(),
        consumed: Vec::new(),
        last: None,
    };
    let env: Env = args.iter().cloned().collect();
    let outcome = match interp.strategy(root, env, 1) {
        Ok(v) => Outcome::Completed(v),
        Err(Stop::Exhausted) => Outcome::Exhausted,
        Err(Stop::KindMismatch) => Outcome::KindMismatch,
    };
    RefTrace {
        steps: interp.steps,
        outcome,
        script: interp.consumed,
    }
}

impl Interp<'_> {
    /// Records a statement execution together with the input it consumed,
    /// if any.
    fn record(&mut self, stmt: &Statement, depth: usize) {
        self.steps.push(Step {
            location: stmt.location.clone(),
            kind: stmt.kind.kind(),
            input: self.last.take(),
            depth,
        });
    }

    fn take(&mut self, want: Want) -> Result<HumanInput, Stop> {
        let input = (self.source)(want).ok_or(Stop::Exhausted)?;
        self.consumed.push(input.clone());
        self.last = Some(input.clone());
        Ok(input)
    }

    fn ack(&mut self) -> Result<(), Stop> {
        match self.take(Want::Ack)? {
            HumanInput::Ack => Ok(()),
            _ => Err(Stop::KindMismatch),
        }
    }

    fn decide(&mut self, until: bool) -> Result<bool, Stop> {
        match self.take(Want::Decision { until })? {
            HumanInput::Decision(b) => Ok(b),
            _ => Err(Stop::KindMismatch),
        }
    }

    fn answer(&mut self) -> Result<Value, Stop> {
        match self.take(Want::Answer)? {
            HumanInput::Answer(v) => Ok(v),
            _ => Err(Stop::KindMismatch),
        }
    }

    fn strategy(&mut self, name: &str, env: Env, depth: usize) -> Result<Value, Stop> {
        let strategy = self.doc.strategy(name).expect("validated");
        let mut env = env;
        match self.block(&strategy.body, &mut env, depth)? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => Ok(Value::Nothing),
        }
    }

    fn invoke(&mut self, call: &CallExpr, env: &Env, depth: usize) -> Result<Value, Stop> {
        let callee = self.doc.strategy(&call.target).expect("validated");
        let fresh: Env = callee
            .params
            .iter()
            .zip(&call.args)
            .map(|(p, a)| (p.clone(), env.get(a).cloned().unwrap_or(Value::Nothing)))
            .collect();
        self.strategy(&call.target, fresh, depth + 1)
    }

    fn block(&mut self, block: &[Statement], env: &mut Env, depth: usize) -> Result<Flow, Stop> {
        for stmt in block {
            if let Flow::Return(v) = self.statement(stmt, env, depth)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn statement(&mut self, stmt: &Statement, env: &mut Env, depth: usize) -> Result<Flow, Stop> {
        match &stmt.kind {
            StatementKind::Action { .. } => {
                self.ack()?;
                self.record(stmt, depth);
            }
            StatementKind::Conditional { block, .. } => {
                let taken = self.decide(false)?;
                self.record(stmt, depth);
                if taken {
                    return self.block(block, env, depth);
                }
            }
            StatementKind::Until { block, .. } => loop {
                let done = self.decide(true)?;
                self.record(stmt, depth);
                if done {
                    break;
                }
                if let Flow::Return(v) = self.block(block, env, depth)? {
                    return Ok(Flow::Return(v));
                }
            },
            StatementKind::ForEach {
                element,
                list,
                block,
            } => {
                let mut index = 0;
                loop {
                    let current = items(env.get(list));
                    let Some(item) = current.get(index).cloned() else {
                        self.record(stmt, depth);
                        break;
                    };
                    self.ack()?;
                    self.record(stmt, depth);
                    index += 1;
                    env.insert(element.clone(), Value::Text(item));
                    if let Flow::Return(v) = self.block(block, env, depth)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StatementKind::Call(call) => {
                self.record(stmt, depth);
                self.invoke(call, env, depth)?;
                self.record(stmt, depth);
            }
            StatementKind::Assignment { target, query } => {
                let value = match query.embedded_call() {
                    Some(call) => {
                        self.record(stmt, depth);
                        let v = self.invoke(call, env, depth)?;
                        self.record(stmt, depth);
                        v
                    }
                    None => {
                        let v = self.answer()?;
                        self.record(stmt, depth);
                        v
                    }
                };
                env.insert(target.clone(), value);
            }
            StatementKind::Return { query } => {
                let value = if let Some(call) = query.embedded_call() {
                    self.record(stmt, depth);
                    let v = self.invoke(call, env, depth)?;
                    self.record(stmt, depth);
                    v
                } else if query.is_nothing() {
                    self.ack()?;
                    self.record(stmt, depth);
                    Value::Nothing
                } else if let Some(v) = query.bare_ref().and_then(|n| env.get(n)).cloned() {
                    self.ack()?;
                    self.record(stmt, depth);
                    v
                } else {
                    let v = self.answer()?;
                    self.record(stmt, depth);
                    v
                };
                return Ok(Flow::Return(value));
            }
        }
        Ok(Flow::Normal)
    }
}
