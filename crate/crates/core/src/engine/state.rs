use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::error::EngineError;
use super::value::{HumanInput, Value};
use crate::syntax::{
    has_errors, validate, CallExpr, Part, SourceLocation, Statement, StatementKind, Strategy,
    StrategyDoc,
};

/// Deepest call stack the engine will build before refusing a call.
pub const MAX_STACK_DEPTH: usize = 4096;

/// Progress of one active `FOR EACH`, keyed by the loop head's path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LoopCursor {
    pub head: Vec<usize>,
    pub list_var: String,
    /// Elements handed out so far; the last one is the current element.
    pub consumed: usize,
}

/// Where a callee's returned value goes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "target")]
pub enum ReturnSlot {
    Root,
    Discard,
    Assign(String),
    Propagate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Frame {
    pub strategy: String,
    /// Path of the current statement inside the strategy's statement tree.
    pub pc: Vec<usize>,
    pub bindings: BTreeMap<String, Value>,
    pub referenced: BTreeSet<String>,
    pub loops: Vec<LoopCursor>,
    pub return_slot: ReturnSlot,
    /// Set when a callee has returned to the statement at `pc`; that
    /// statement then only needs to be completed.
    pub returned: Option<Value>,
}

impl Frame {
    fn is_visible(&self, name: &str) -> bool {
        self.bindings.contains_key(name) && self.referenced.contains(name)
    }

    fn bind(&mut self, name: &str, value: Value) {
        self.bindings.insert(name.to_string(), value);
        self.referenced.insert(name.to_string());
    }

    fn mark_referenced<'a>(&mut self, names: impl IntoIterator<Item = &'a str>) {
        for name in names {
            if self.bindings.contains_key(name) {
                self.referenced.insert(name.to_string());
            }
        }
    }

    fn cursor(&self, head: &[usize]) -> Option<&LoopCursor> {
        self.loops.iter().find(|c| c.head == head)
    }

    fn cursor_mut(&mut self, head: &[usize]) -> Option<&mut LoopCursor> {
        self.loops.iter_mut().find(|c| c.head == head)
    }

    fn items_of(&self, name: &str) -> Vec<String> {
        self.bindings.get(name).map(Value::items).unwrap_or_default()
    }
}

/// The part of the state that stepping back restores.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Machine {
    pub stack: Vec<Frame>,
    pub completed: Option<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InputKind {
    ConditionDecision,
    QueryAnswer,
    ActionAcknowledge,
    IterationAcknowledge,
}

impl InputKind {
    pub fn accepts(self, input: &HumanInput) -> bool {
        matches!(
            (self, input),
            (InputKind::ConditionDecision, HumanInput::Decision(_))
                | (InputKind::QueryAnswer, HumanInput::Answer(_))
                | (InputKind::ActionAcknowledge, HumanInput::Ack)
                | (InputKind::IterationAcknowledge, HumanInput::Ack)
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InputKind::ConditionDecision => "ConditionDecision",
            InputKind::QueryAnswer => "QueryAnswer",
            InputKind::ActionAcknowledge => "ActionAcknowledge",
            InputKind::IterationAcknowledge => "IterationAcknowledge",
        }
    }
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PendingInput {
    pub kind: InputKind,
    /// The statement with variable references replaced by their values.
    pub prompt: String,
    pub statement_location: SourceLocation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum Status {
    AwaitingInput(PendingInput),
    ReadyToAdvance,
    Completed(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum EventPayload {
    StartedWithArguments {
        root: String,
        args: BTreeMap<String, Value>,
    },
    AdvancedWith {
        input: Option<HumanInput>,
    },
    SteppedBack,
    VariableEdited {
        name: String,
        old: Value,
        new: Value,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Event {
    pub ordinal: u64,
    pub timestamp_ms: u64,
    pub payload: EventPayload,
}

/// Everything an observer can see of a state, for equality checks that
/// ignore the event log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub stack: Vec<Frame>,
    pub status: Status,
    pub visible: Vec<(String, Value)>,
    pub history_len: usize,
}

/// A running strategy. Every operation either succeeds or leaves the state
/// untouched.
#[derive(Debug, Clone)]
pub struct ExecutionState {
    pub(crate) doc: Arc<StrategyDoc>,
    pub(crate) root: String,
    pub(crate) machine: Machine,
    /// Machine as it was on arrival at the current statement.
    pub(crate) checkpoint: Machine,
    pub(crate) history: Vec<Machine>,
    pub(crate) events: Vec<Event>,
}

enum Need {
    Input(InputKind),
    Ready,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl ExecutionState {
    pub fn start(
        doc: Arc<StrategyDoc>,
        root: &str,
        args: BTreeMap<String, Value>,
    ) -> Result<Self, EngineError> {
        let diags = validate(&doc);
        if has_errors(&diags) {
            return Err(EngineError::ValidationFailed(
                diags.into_iter().filter(|d| d.is_error()).collect(),
            ));
        }
        let strategy = doc
            .strategy(root)
            .ok_or_else(|| EngineError::UnknownStrategy(root.to_string()))?;
        let expected: BTreeSet<&String> = strategy.params.iter().collect();
        let got: BTreeSet<&String> = args.keys().collect();
        if expected != got {
            return Err(EngineError::ArityMismatch {
                strategy: root.to_string(),
                expected: strategy.params.clone(),
                got: args.keys().cloned().collect(),
            });
        }
        let mut frame = Frame {
            strategy: root.to_string(),
            pc: Vec::new(),
            bindings: BTreeMap::new(),
            referenced: BTreeSet::new(),
            loops: Vec::new(),
            return_slot: ReturnSlot::Root,
            returned: None,
        };
        for param in &strategy.params {
            frame.bind(param, args[param].clone());
        }
        let mut machine = Machine {
            stack: vec![frame],
            completed: None,
        };
        Stepper::new(&doc, &mut machine).arrive(vec![0]);
        let mut state = Self {
            doc,
            root: root.to_string(),
            checkpoint: machine.clone(),
            machine,
            history: Vec::new(),
            events: Vec::new(),
        };
        state.log(EventPayload::StartedWithArguments {
            root: root.to_string(),
            args,
        });
        Ok(state)
    }

    /// Rebuilds a state by applying a recorded event log to a fresh start.
    pub fn replay(doc: Arc<StrategyDoc>, events: &[Event]) -> Result<Self, EngineError> {
        for (i, event) in events.iter().enumerate() {
            if event.ordinal != i as u64 + 1 {
                return Err(EngineError::CorruptEventLog(format!(
                    "ordinal {} at position {}",
                    event.ordinal,
                    i + 1
                )));
            }
        }
        let (first, rest) = events
            .split_first()
            .ok_or_else(|| EngineError::CorruptEventLog("empty log".into()))?;
        let EventPayload::StartedWithArguments { root, args } = &first.payload else {
            return Err(EngineError::CorruptEventLog(
                "log does not begin with StartedWithArguments".into(),
            ));
        };
        let mut state = Self::start(doc, root, args.clone())?;
        for event in rest {
            state.apply(&event.payload)?;
        }
        state.events = events.to_vec();
        Ok(state)
    }

    /// Applies one recorded event.
    pub fn apply(&mut self, payload: &EventPayload) -> Result<(), EngineError> {
        match payload {
            EventPayload::StartedWithArguments { .. } => Err(EngineError::CorruptEventLog(
                "StartedWithArguments after the first event".into(),
            )),
            EventPayload::AdvancedWith { input } => self.next(input.clone()),
            EventPayload::SteppedBack => self.previous(),
            EventPayload::VariableEdited { name, new, .. } => self.set_variable(name, new.clone()),
        }
    }

    fn log(&mut self, payload: EventPayload) {
        self.events.push(Event {
            ordinal: self.events.len() as u64 + 1,
            timestamp_ms: now_ms(),
            payload,
        });
    }

    pub fn doc(&self) -> &Arc<StrategyDoc> {
        &self.doc
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn last_ordinal(&self) -> u64 {
        self.events.last().map_or(0, |e| e.ordinal)
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn can_step_back(&self) -> bool {
        !self.history.is_empty()
    }

    pub fn stack(&self) -> &[Frame] {
        &self.machine.stack
    }

    pub fn depth(&self) -> usize {
        self.machine.stack.len()
    }

    pub fn is_completed(&self) -> bool {
        self.machine.completed.is_some()
    }

    pub fn current_frame(&self) -> &Frame {
        self.machine.stack.last().expect("stack is never empty")
    }

    /// Strategy and statement under the program counter, `None` once
    /// completed.
    pub fn current(&self) -> Option<(&Strategy, &Statement)> {
        if self.is_completed() {
            return None;
        }
        let frame = self.current_frame();
        let strategy = self.doc.strategy(&frame.strategy)?;
        Some((strategy, strategy.statement_at(&frame.pc)?))
    }

    pub fn current_location(&self) -> Option<&SourceLocation> {
        self.current().map(|(_, stmt)| &stmt.location)
    }

    /// Variables the developer can currently see: bindings of the current
    /// frame that some executed statement has referenced.
    pub fn visible_variables(&self) -> Vec<(String, Value)> {
        let frame = self.current_frame();
        frame
            .bindings
            .iter()
            .filter(|(name, _)| frame.referenced.contains(*name))
            .map(|(n, v)| (n.clone(), v.clone()))
            .collect()
    }

    pub fn status(&self) -> Status {
        if let Some(value) = &self.machine.completed {
            return Status::Completed(value.clone());
        }
        match self.need() {
            Need::Ready => Status::ReadyToAdvance,
            Need::Input(kind) => {
                let (_, stmt) = self.current().expect("not completed");
                Status::AwaitingInput(PendingInput {
                    kind,
                    prompt: self.prompt(stmt),
                    statement_location: stmt.location.clone(),
                })
            }
        }
    }

    pub fn pending_input(&self) -> Option<PendingInput> {
        match self.status() {
            Status::AwaitingInput(p) => Some(p),
            _ => None,
        }
    }

    pub fn observe(&self) -> Observation {
        Observation {
            stack: self.machine.stack.clone(),
            status: self.status(),
            visible: self.visible_variables(),
            history_len: self.history.len(),
        }
    }

    fn need(&self) -> Need {
        let frame = self.current_frame();
        let (_, stmt) = self.current().expect("not completed");
        if frame.returned.is_some() {
            return Need::Ready;
        }
        match &stmt.kind {
            StatementKind::Action { .. } => Need::Input(InputKind::ActionAcknowledge),
            StatementKind::Conditional { .. } | StatementKind::Until { .. } => {
                Need::Input(InputKind::ConditionDecision)
            }
            StatementKind::ForEach { list, .. } => {
                let consumed = frame.cursor(&frame.pc).map_or(0, |c| c.consumed);
                if consumed < frame.items_of(list).len() {
                    Need::Input(InputKind::IterationAcknowledge)
                } else {
                    Need::Ready
                }
            }
            StatementKind::Call(_) => Need::Ready,
            StatementKind::Assignment { query, .. } => match query.embedded_call() {
                Some(_) => Need::Ready,
                None => Need::Input(InputKind::QueryAnswer),
            },
            StatementKind::Return { query } => {
                if query.embedded_call().is_some() {
                    Need::Ready
                } else if query.is_nothing()
                    || query.bare_ref().is_some_and(|n| frame.bindings.contains_key(n))
                {
                    Need::Input(InputKind::ActionAcknowledge)
                } else {
                    Need::Input(InputKind::QueryAnswer)
                }
            }
        }
    }

    fn prompt(&self, stmt: &Statement) -> String {
        let frame = self.current_frame();
        let resolve = |parts: &[Part]| -> String {
            let resolved: Vec<Part> = parts
                .iter()
                .map(|p| match p {
                    Part::Ref(name) => match frame.bindings.get(name) {
                        Some(v) => Part::Word(v.to_string()),
                        None => p.clone(),
                    },
                    _ => p.clone(),
                })
                .collect();
            crate::syntax::render_parts(&resolved)
        };
        match &stmt.kind {
            StatementKind::Action { words } => resolve(words),
            StatementKind::Conditional { query, .. } => format!("IF {}", resolve(&query.parts)),
            StatementKind::Until { query, .. } => format!("UNTIL {}", resolve(&query.parts)),
            StatementKind::Assignment { target, query } => {
                format!("SET '{target}' TO {}", resolve(&query.parts))
            }
            StatementKind::Return { query } => format!("RETURN {}", resolve(&query.parts)),
            StatementKind::ForEach { element, list, .. } => {
                let consumed = frame.cursor(&frame.pc).map_or(0, |c| c.consumed);
                let next = frame.items_of(list).get(consumed).cloned().unwrap_or_default();
                format!("FOR EACH '{element}' IN '{list}': next element is {next}")
            }
            StatementKind::Call(_) => crate::syntax::render_statement_line(&stmt.kind),
        }
    }

    /// Executes the current statement with the developer's input and moves
    /// the program counter.
    pub fn next(&mut self, input: Option<HumanInput>) -> Result<(), EngineError> {
        if self.is_completed() {
            return Err(EngineError::SessionCompleted);
        }
        match (self.need(), &input) {
            (Need::Ready, None) => {}
            (Need::Ready, Some(got)) => {
                return Err(EngineError::InputKindMismatch {
                    expected: "no".into(),
                    got: got.kind_name().into(),
                })
            }
            (Need::Input(kind), None) => return Err(EngineError::MissingInput(kind.to_string())),
            (Need::Input(kind), Some(got)) if !kind.accepts(got) => {
                return Err(EngineError::InputKindMismatch {
                    expected: kind.to_string(),
                    got: got.kind_name().into(),
                })
            }
            (Need::Input(_), Some(_)) => {}
        }
        let mut machine = self.machine.clone();
        Stepper::new(&self.doc, &mut machine).step(input.clone())?;
        self.history.push(std::mem::replace(&mut self.checkpoint, machine.clone()));
        self.machine = machine;
        self.log(EventPayload::AdvancedWith { input });
        Ok(())
    }

    /// Undoes the most recent forward step, including any variable edits
    /// made while its statement was current.
    pub fn previous(&mut self) -> Result<(), EngineError> {
        let restored = self.history.pop().ok_or(EngineError::AtStart)?;
        self.machine = restored.clone();
        self.checkpoint = restored;
        self.log(EventPayload::SteppedBack);
        Ok(())
    }

    /// Replaces the value of a visible variable in the current frame.
    /// Elements an active loop has already handed out cannot change.
    pub fn set_variable(&mut self, name: &str, value: Value) -> Result<(), EngineError> {
        if self.is_completed() {
            return Err(EngineError::SessionCompleted);
        }
        let frame = self.machine.stack.last_mut().expect("stack is never empty");
        if !frame.is_visible(name) {
            return Err(EngineError::UnknownOrHiddenVariable(name.to_string()));
        }
        let old_items = frame.items_of(name);
        let new_items = value.items();
        for cursor in frame.loops.iter().filter(|c| c.list_var == name) {
            let n = cursor.consumed;
            if new_items.len() < n || new_items[..n] != old_items[..n.min(old_items.len())] {
                return Err(EngineError::LoopElementLocked {
                    name: name.to_string(),
                    consumed: n,
                });
            }
        }
        let old = frame.bindings.insert(name.to_string(), value.clone());
        self.log(EventPayload::VariableEdited {
            name: name.to_string(),
            old: old.unwrap_or(Value::Nothing),
            new: value,
        });
        Ok(())
    }
}

/// Transition logic over a machine and the document it runs.
struct Stepper<'a> {
    doc: &'a StrategyDoc,
    m: &'a mut Machine,
}

impl<'a> Stepper<'a> {
    fn new(doc: &'a StrategyDoc, m: &'a mut Machine) -> Self {
        Self { doc, m }
    }

    fn top(&mut self) -> &mut Frame {
        self.m.stack.last_mut().expect("stack is never empty")
    }

    fn strategy(&self) -> &'a Strategy {
        let name = &self.m.stack.last().expect("stack is never empty").strategy;
        self.doc.strategy(name).expect("frame strategy exists")
    }

    fn arrive(&mut self, path: Vec<usize>) {
        let stmt = self.strategy().statement_at(&path).expect("valid path");
        let frame = self.top();
        if let StatementKind::ForEach { list, .. } = &stmt.kind {
            if frame.cursor(&path).is_none() {
                frame.loops.push(LoopCursor {
                    head: path.clone(),
                    list_var: list.clone(),
                    consumed: 0,
                });
            }
        }
        frame.pc = path;
    }

    fn step(&mut self, input: Option<HumanInput>) -> Result<(), EngineError> {
        let strategy = self.strategy();
        let pc = self.top().pc.clone();
        let stmt = strategy.statement_at(&pc).expect("valid path");

        if let Some(value) = self.top().returned.take() {
            match stmt.kind {
                StatementKind::Return { .. } => self.pop_frame(value),
                _ => self.advance(),
            }
            return Ok(());
        }

        match &stmt.kind {
            StatementKind::Action { .. } => {
                self.top().mark_referenced(stmt.kind.references());
                self.advance();
            }
            StatementKind::Conditional { .. } => {
                self.top().mark_referenced(stmt.kind.references());
                if let Some(HumanInput::Decision(true)) = input {
                    self.arrive(child(&pc));
                } else {
                    self.advance();
                }
            }
            StatementKind::Until { .. } => {
                self.top().mark_referenced(stmt.kind.references());
                if let Some(HumanInput::Decision(true)) = input {
                    self.advance();
                } else {
                    self.arrive(child(&pc));
                }
            }
            StatementKind::ForEach { element, list, .. } => {
                let frame = self.top();
                let items = frame.items_of(list);
                let cursor = frame.cursor_mut(&pc).expect("cursor created on arrival");
                if let Some(item) = items.get(cursor.consumed).cloned() {
                    cursor.consumed += 1;
                    frame.bind(element, Value::Text(item));
                    frame.mark_referenced([list.as_str()]);
                    self.arrive(child(&pc));
                } else {
                    frame.loops.retain(|c| c.head != pc);
                    self.advance();
                }
            }
            StatementKind::Call(call) => self.push_frame(call, ReturnSlot::Discard)?,
            StatementKind::Assignment { target, query } => match query.embedded_call() {
                Some(call) => self.push_frame(call, ReturnSlot::Assign(target.clone()))?,
                None => {
                    let Some(HumanInput::Answer(value)) = input else {
                        unreachable!("input kind checked by caller")
                    };
                    let frame = self.top();
                    frame.mark_referenced(stmt.kind.references());
                    frame.bind(target, value);
                    self.advance();
                }
            },
            StatementKind::Return { query } => {
                if let Some(call) = query.embedded_call() {
                    self.push_frame(call, ReturnSlot::Propagate)?;
                    return Ok(());
                }
                let frame = self.top();
                frame.mark_referenced(stmt.kind.references());
                let value = match input {
                    Some(HumanInput::Answer(value)) => value,
                    _ if query.is_nothing() => Value::Nothing,
                    _ => query
                        .bare_ref()
                        .and_then(|n| frame.bindings.get(n).cloned())
                        .unwrap_or(Value::Nothing),
                };
                self.pop_frame(value);
            }
        }
        Ok(())
    }

    /// Moves past the statement at the program counter: to its next sibling,
    /// back to an enclosing loop head, or out of the strategy.
    fn advance(&mut self) {
        let strategy = self.strategy();
        let mut path = self.top().pc.clone();
        loop {
            *path.last_mut().expect("non-empty path") += 1;
            let siblings = strategy.block_at(&path).expect("valid path");
            if path[path.len() - 1] < siblings.len() {
                self.arrive(path);
                return;
            }
            path.pop();
            if path.is_empty() {
                self.pop_frame(Value::Nothing);
                return;
            }
            match strategy.statement_at(&path).expect("valid path").kind {
                StatementKind::ForEach { .. } | StatementKind::Until { .. } => {
                    self.arrive(path);
                    return;
                }
                _ => {}
            }
        }
    }

    fn push_frame(&mut self, call: &CallExpr, slot: ReturnSlot) -> Result<(), EngineError> {
        if self.m.stack.len() >= MAX_STACK_DEPTH {
            return Err(EngineError::StackOverflow(MAX_STACK_DEPTH));
        }
        let callee = self
            .doc
            .strategy(&call.target)
            .ok_or_else(|| EngineError::UnknownStrategy(call.target.clone()))?;
        let caller = self.top();
        caller.mark_referenced(call.args.iter().map(String::as_str));
        let mut frame = Frame {
            strategy: callee.name.clone(),
            pc: Vec::new(),
            bindings: BTreeMap::new(),
            referenced: BTreeSet::new(),
            loops: Vec::new(),
            return_slot: slot,
            returned: None,
        };
        for (param, arg) in callee.params.iter().zip(&call.args) {
            let value = caller.bindings.get(arg).cloned().unwrap_or(Value::Nothing);
            frame.bind(param, value);
        }
        self.m.stack.push(frame);
        self.arrive(vec![0]);
        Ok(())
    }

    fn pop_frame(&mut self, value: Value) {
        if self.m.stack.len() == 1 {
            self.m.completed = Some(value);
            return;
        }
        let callee = self.m.stack.pop().expect("depth > 1");
        let caller = self.top();
        if let ReturnSlot::Assign(target) = &callee.return_slot {
            caller.bind(target, value.clone());
        }
        caller.returned = Some(value);
    }
}

fn child(path: &[usize]) -> Vec<usize> {
    let mut p = path.to_vec();
    p.push(0);
    p
}
