//! Property checks shared by the unit-level proptests and the acceptance
//! suite. Each returns a description of the first violation found.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

use roboto_core::engine::{run_scripted, EngineError, ExecutionState, HumanInput, InputKind, Status, Value};
use roboto_core::syntax::{format, parse, Kind, StrategyDoc};

use crate::reference::{self, Outcome, RefTrace, Want};
use crate::{arg_map, gen, located, root_args, scripts};

pub type CheckResult = Result<(), String>;

/// A generated document, its root call, and a script produced by the
/// reference interpreter answering randomly.
#[derive(Debug, Clone)]
pub struct Case {
    pub doc: Arc<StrategyDoc>,
    pub root: String,
    pub args: Vec<(String, Value)>,
    pub reference: RefTrace,
}

pub const INPUT_CAP: usize = 60;

pub fn random_case(seed: u64) -> Case {
    let mut rng = crate::rng(seed);
    let doc = located(&gen::random_doc(&mut rng, gen::GenConfig::executable()));
    let root = doc.strategies[0].name.clone();
    let args = root_args(&doc, &root, &mut rng);
    let mut responder = scripts::random_responder(&mut rng, INPUT_CAP);
    let reference = reference::run_with(&doc, &root, &args, &mut responder);
    Case {
        doc,
        root,
        args,
        reference,
    }
}

/// parse(format(doc)) is structurally `doc`, and formatting is a fixed
/// point after one pass.
pub fn round_trip(doc: &StrategyDoc) -> CheckResult {
    let text = format(doc);
    let reparsed = parse(&text).map_err(|d| format!("formatted text fails to parse: {d:?}\n{text}"))?;
    if !reparsed.structurally_eq(doc) {
        return Err(format!("structure changed across format/parse:\n{text}"));
    }
    let again = format(&reparsed);
    if again != text {
        return Err(format!("format is not idempotent:\n{text}\n---\n{again}"));
    }
    Ok(())
}

/// The stepping engine and the reference interpreter agree on every
/// executed statement, the input it consumed, the stack depth, and the
/// final outcome.
pub fn oracle_equivalence(case: &Case) -> CheckResult {
    let result = run_scripted(case.doc.clone(), &case.root, arg_map(&case.args), &case.reference.script);
    let (entries, outcome) = match &result {
        Ok(trace) => (&trace.entries, Outcome::Completed(trace.completed_value().cloned().unwrap())),
        Err(f) => match &f.error {
            EngineError::ScriptExhausted(_) => (&f.trace.entries, Outcome::Exhausted),
            other => return Err(format!("engine failed: {other}")),
        },
    };
    if outcome != case.reference.outcome {
        return Err(format!(
            "outcome differs: engine {outcome:?}, reference {:?}",
            case.reference.outcome
        ));
    }
    if entries.len() != case.reference.steps.len() {
        return Err(format!(
            "trace length differs: engine {}, reference {}",
            entries.len(),
            case.reference.steps.len()
        ));
    }
    for (i, (e, r)) in entries.iter().zip(&case.reference.steps).enumerate() {
        if e.location != r.location || e.kind != r.kind || e.input != r.input || e.depth != r.depth {
            return Err(format!("step {i} differs: engine {e:?}, reference {r:?}"));
        }
    }
    Ok(())
}

/// Drives the engine through a script, returning the per-step inputs
/// (`None` for steps that need none).
pub fn engine_steps(state: &ExecutionState, script: &[HumanInput]) -> Vec<Option<HumanInput>> {
    let mut state = state.clone();
    let mut inputs = script.iter();
    let mut steps = Vec::new();
    loop {
        let input = match state.status() {
            Status::Completed(_) => break,
            Status::ReadyToAdvance => None,
            Status::AwaitingInput(_) => match inputs.next() {
                Some(i) => Some(i.clone()),
                None => break,
            },
        };
        state.next(input.clone()).expect("script matches pending inputs");
        steps.push(input);
    }
    steps
}

/// Picks a well-typed input for the engine's current statement, or `None`
/// once it has completed.
pub fn random_step(state: &ExecutionState, rng: &mut StdRng) -> Option<Option<HumanInput>> {
    let pending = match state.status() {
        Status::Completed(_) => return None,
        Status::ReadyToAdvance => return Some(None),
        Status::AwaitingInput(p) => p,
    };
    let want = match pending.kind {
        InputKind::ConditionDecision => Want::Decision {
            until: state.current().is_some_and(|(_, s)| s.kind.kind() == Kind::Until),
        },
        InputKind::QueryAnswer => Want::Answer,
        InputKind::ActionAcknowledge | InputKind::IterationAcknowledge => Want::Ack,
    };
    Some(scripts::random_responder(rng, 1)(want))
}

/// Upper bound on forward steps in sessions that interleave edits.
pub const STEP_CAP: usize = 100;

fn start(case: &Case) -> Result<ExecutionState, String> {
    ExecutionState::start(case.doc.clone(), &case.root, arg_map(&case.args)).map_err(|e| e.to_string())
}

/// Attempts one random edit of a visible variable. A rejected edit must
/// leave the state observably unchanged.
fn random_edit(state: &mut ExecutionState, rng: &mut StdRng) -> CheckResult {
    if state.is_completed() {
        return Ok(());
    }
    let visible = state.visible_variables();
    let Some((name, value)) = visible.choose(rng).cloned() else {
        return Ok(());
    };
    let new = match rng.random_range(0..4) {
        0 => {
            let mut items = value.items();
            items.push(format!("extra{}", rng.random_range(0..10)));
            Value::List(items)
        }
        1 => Value::Text("edited".into()),
        2 => Value::Nothing,
        _ => value.clone(),
    };
    let before = state.observe();
    let events = state.events().len();
    match state.set_variable(&name, new) {
        Ok(()) => Ok(()),
        Err(EngineError::LoopElementLocked { .. }) => {
            if state.observe() != before || state.events().len() != events {
                Err(format!("rejected edit of '{name}' changed the state"))
            } else {
                Ok(())
            }
        }
        Err(e) => Err(format!("unexpected edit error: {e}")),
    }
}

/// For every prefix length k, k forward steps (with random edits between
/// them) followed by k `previous` calls restore the post-start state. Stack
/// depth changes by at most one per step.
pub fn reversibility(case: &Case, seed: u64) -> CheckResult {
    let mut rng = crate::rng(seed);
    let fresh = start(case)?;
    let initial = fresh.observe();
    let mut forward = fresh;
    for k in 1..=STEP_CAP {
        if rng.random_bool(0.2) {
            random_edit(&mut forward, &mut rng)?;
        }
        let Some(input) = random_step(&forward, &mut rng) else {
            break;
        };
        let depth = forward.depth();
        forward.next(input).map_err(|e| format!("step {k}: {e}"))?;
        if forward.depth().abs_diff(depth) > 1 {
            return Err(format!("step {k} changed depth from {depth} to {}", forward.depth()));
        }
        if forward.history_len() != k {
            return Err(format!("history length {} after {k} steps", forward.history_len()));
        }
        let mut back = forward.clone();
        for j in 0..k {
            back.previous().map_err(|e| format!("previous {j} of {k}: {e}"))?;
        }
        if back.observe() != initial {
            return Err(format!("forward {k} then back {k} differs from the start state"));
        }
        if !matches!(back.previous(), Err(EngineError::AtStart)) {
            return Err("previous at start did not fail with AtStart".into());
        }
    }
    Ok(())
}

/// Replaying a session's event log reproduces its state, including after
/// edits and steps back.
pub fn replay_equivalence(case: &Case, seed: u64) -> CheckResult {
    let mut rng = crate::rng(seed);
    let mut state = start(case)?;
    for _ in 0..STEP_CAP {
        match rng.random_range(0..10) {
            0 if state.can_step_back() => state.previous().map_err(|e| e.to_string())?,
            1 => random_edit(&mut state, &mut rng)?,
            _ => match random_step(&state, &mut rng) {
                Some(input) => state.next(input).map_err(|e| e.to_string())?,
                None => break,
            },
        }
    }
    let replayed = ExecutionState::replay(case.doc.clone(), state.events()).map_err(|e| e.to_string())?;
    if replayed.observe() != state.observe() || replayed.view() != state.view() {
        return Err("replayed state differs".into());
    }
    if replayed.events() != state.events() {
        return Err("replayed event log differs".into());
    }
    Ok(())
}

/// Two scripted runs with the same arguments serialize identically.
pub fn determinism(case: &Case) -> CheckResult {
    let run = || {
        let r = run_scripted(case.doc.clone(), &case.root, arg_map(&case.args), &case.reference.script);
        match r {
            Ok(t) => serde_json::to_string(&t).unwrap(),
            Err(f) => format!("{}{}", f.error.code(), serde_json::to_string(&f.trace).unwrap()),
        }
    };
    if run() != run() {
        return Err("scripted runs differ".into());
    }
    Ok(())
}

/// Snapshot round-trip at every step preserves observation, and `previous`
/// after the round-trip matches `previous` without it.
pub fn snapshot_round_trip(case: &Case) -> CheckResult {
    let mut state = start(case)?;
    let steps = engine_steps(&state, &case.reference.script);
    for (k, input) in steps.into_iter().enumerate() {
        state.next(input).map_err(|e| e.to_string())?;
        let restored = ExecutionState::from_snapshot(&state.to_snapshot(), case.doc.clone())
            .map_err(|e| format!("step {k}: {e}"))?;
        if restored.observe() != state.observe() || restored.events() != state.events() {
            return Err(format!("step {k}: round-trip changed the state"));
        }
        let (mut a, mut b) = (state.clone(), restored);
        let ra = a.previous().map(|_| a.observe());
        let rb = b.previous().map(|_| b.observe());
        if ra != rb {
            return Err(format!("step {k}: previous after round-trip differs"));
        }
    }
    Ok(())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> CheckResult {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The four corpus files parse cleanly with the expected shapes, and the
/// debug file carries exactly one warning.
pub fn corpus_fidelity() -> CheckResult {
    use roboto_core::corpus;
    use roboto_core::syntax::{parse_file, validate, Code};

    let mut docs = Vec::new();
    for (file, text) in corpus::BUILTIN {
        let doc = parse_file(file, text).map_err(|d| format!("{file}: {d:?}"))?;
        docs.push((file, doc));
    }
    for (file, doc) in &docs {
        let diags = validate(doc);
        let errors = diags.iter().filter(|d| d.is_error()).count();
        ensure(errors == 0, || format!("{file}: {errors} validation errors"))?;
        if *file == "debug.roboto" {
            ensure(diags.len() == 1, || format!("debug: {} diagnostics", diags.len()))?;
            let d = &diags[0];
            ensure(d.code == Code::UndefinedReference && d.message.contains("'value'"), || {
                format!("debug: unexpected diagnostic {d}")
            })?;
        } else {
            ensure(diags.is_empty(), || format!("{file}: unexpected diagnostics {diags:?}"))?;
        }
    }
    let get = |name: &str| &docs.iter().find(|(f, _)| f.starts_with(name)).unwrap().1;
    let rename = &get("renameVariable").strategies[0];
    let kinds: Vec<Kind> = rename.body.iter().map(|s| s.kind.kind()).collect();
    ensure(
        kinds == [Kind::Assignment, Kind::ForEach, Kind::Assignment, Kind::ForEach],
        || format!("renameVariable body {kinds:?}"),
    )?;
    ensure(rename.params == ["name"], || format!("renameVariable params {:?}", rename.params))?;
    let hanoi = &get("towerOfHanoi").strategies[0];
    ensure(
        hanoi.params == ["level", "source", "target", "auxiliary"],
        || format!("towerOfHanoi params {:?}", hanoi.params),
    )?;
    let debug = get("debug");
    ensure(
        debug.strategy_names() == ["debug", "localizeWrongValue"],
        || format!("debug strategies {:?}", debug.strategy_names()),
    )?;
    for (file, doc) in &docs {
        round_trip(doc).map_err(|e| format!("{file}: {e}"))?;
    }
    Ok(())
}

/// Move counts and stack depth of both Hanoi variants for levels 1 to 4,
/// checked against the closed forms and the reference interpreter.
pub fn hanoi_traces() -> CheckResult {
    use roboto_core::corpus;

    for (text, corrected) in [(corpus::TOWER_OF_HANOI, false), (corpus::TOWER_OF_HANOI_CORRECTED, true)] {
        let doc = Arc::new(parse(text).map_err(|d| format!("{d:?}"))?);
        for level in 1..=4u32 {
            let script = scripts::hanoi(level, corrected);
            let args = scripts::hanoi_args(level);
            let trace = run_scripted(doc.clone(), "towerOfHanoi", arg_map(&args), &script)
                .map_err(|f| format!("level {level}: {}", f.error))?;
            let moves = trace.count(|e| e.kind == Kind::Action) as u64;
            let expected = scripts::hanoi_moves(level, corrected);
            let label = if corrected { "corrected" } else { "as printed" };
            ensure(moves == expected, || format!("{label} level {level}: {moves} moves, expected {expected}"))?;
            ensure(trace.max_depth() == level as usize, || {
                format!("{label} level {level}: max depth {}", trace.max_depth())
            })?;
            ensure(trace.completed_value() == Some(&Value::Nothing), || {
                format!("{label} level {level}: status {:?}", trace.status)
            })?;
            let reference = reference::run(&doc, "towerOfHanoi", &args, &script);
            ensure(reference.outcome == Outcome::Completed(Value::Nothing), || {
                format!("{label} level {level}: reference {:?}", reference.outcome)
            })?;
            let engine: Vec<_> = trace.entries.iter().map(|e| (&e.location, e.kind, e.depth)).collect();
            let naive: Vec<_> = reference.steps.iter().map(|s| (&s.location, s.kind, s.depth)).collect();
            ensure(engine == naive, || format!("{label} level {level}: trace differs from reference"))?;
        }
    }
    Ok(())
}

fn tdd_state() -> Result<ExecutionState, String> {
    let doc = Arc::new(parse(roboto_core::corpus::TEST_DRIVEN_DEVELOPMENT).map_err(|d| format!("{d:?}"))?);
    let args = [("requirements".to_string(), Value::Text("a todo app".into()))];
    ExecutionState::start(doc, "testDrivenDevelopment", arg_map(&args)).map_err(|e| e.to_string())
}

fn feed(state: &mut ExecutionState, script: &[HumanInput]) -> CheckResult {
    for input in script {
        while state.status() == Status::ReadyToAdvance {
            state.next(None).map_err(|e| e.to_string())?;
        }
        state.next(Some(input.clone())).map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// TDD loop behaviour: two scenarios give two iterations, an append made
/// mid-loop adds a third, and consumed elements cannot be edited.
pub fn loop_semantics() -> CheckResult {
    let doc = tdd_state()?.doc().clone();
    let args = [("requirements".to_string(), Value::Text("a todo app".into()))];
    let trace = run_scripted(doc, "testDrivenDevelopment", arg_map(&args), &scripts::tdd("a, b"))
        .map_err(|f| f.error.to_string())?;
    let entered = trace.count(|e| e.kind == Kind::ForEach && e.input.is_some());
    ensure(entered == 2, || format!("loop entered {entered} times for \"a, b\""))?;
    ensure(trace.completed_value().is_some(), || "TDD run did not complete".into())?;

    // Answer the scenarios, enter the first iteration, then append.
    let mut state = tdd_state()?;
    feed(&mut state, &[HumanInput::answer("a, b"), HumanInput::Ack])?;
    let bound = state.visible_variables();
    ensure(
        bound.contains(&("scenario".into(), Value::Text("a".into()))),
        || format!("first element not bound: {bound:?}"),
    )?;

    let before = state.observe();
    let events = state.events().len();
    let locked = state.set_variable("scenarios", Value::list(["z", "b"]));
    ensure(matches!(locked, Err(EngineError::LoopElementLocked { .. })), || {
        format!("editing a consumed element gave {locked:?}")
    })?;
    ensure(state.observe() == before && state.events().len() == events, || {
        "rejected edit changed the state".into()
    })?;

    state
        .set_variable("scenarios", Value::list(["a", "b", "c"]))
        .map_err(|e| format!("append rejected: {e}"))?;
    let mut visited = vec!["a".to_string()];
    let mut guard = 0;
    while !state.is_completed() && guard < 500 {
        guard += 1;
        let input = match state.status() {
            Status::ReadyToAdvance => None,
            Status::AwaitingInput(p) => Some(match p.kind {
                InputKind::ConditionDecision => HumanInput::Decision(true),
                InputKind::QueryAnswer => HumanInput::Answer(Value::Nothing),
                _ => HumanInput::Ack,
            }),
            Status::Completed(_) => unreachable!(),
        };
        let entering = state.current().is_some_and(|(_, s)| s.kind.kind() == Kind::ForEach) && input.is_some();
        state.next(input).map_err(|e| e.to_string())?;
        if entering {
            let element = state.current_frame().bindings.get("scenario").cloned();
            visited.push(element.map(|v| v.to_string()).unwrap_or_default());
        }
    }
    ensure(visited == ["a", "b", "c"], || format!("visited {visited:?} after appending c"))?;
    Ok(())
}

/// A mid-loop snapshot restored from bytes steps back exactly like the
/// original, and a truncated snapshot is rejected as corrupt.
pub fn persistence_round_trip() -> CheckResult {
    let mut state = tdd_state()?;
    feed(&mut state, &[HumanInput::answer("a, b, c"), HumanInput::Ack, HumanInput::Ack])?;
    let bytes = state.to_snapshot();
    let mut restored = ExecutionState::from_snapshot(&bytes, state.doc().clone()).map_err(|e| e.to_string())?;
    ensure(restored.observe() == state.observe(), || "round-trip changed the state".into())?;
    ensure(restored.view() == state.view(), || "round-trip changed the view".into())?;
    state.previous().map_err(|e| e.to_string())?;
    restored.previous().map_err(|e| e.to_string())?;
    ensure(restored.observe() == state.observe(), || "previous after round-trip differs".into())?;
    let truncated = ExecutionState::from_snapshot(&bytes[..bytes.len() / 2], state.doc().clone());
    ensure(matches!(truncated, Err(EngineError::CorruptPayload(_))), || {
        format!("truncated snapshot gave {:?}", truncated.err())
    })?;
    Ok(())
}
