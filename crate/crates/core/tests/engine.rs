use std::collections::BTreeMap;
use std::sync::Arc;

use roboto_core::corpus;
use roboto_core::engine::{
    run_scripted, Actor, EngineError, ExecutionState, HumanInput, InputKind, Status, Value,
    SNAPSHOT_VERSION,
};
use roboto_core::syntax::{parse, Kind, StatementKind, StrategyDoc};
use roboto_testkit::{arg_map, checks, scripts};

fn doc(text: &str) -> Arc<StrategyDoc> {
    Arc::new(parse(text).unwrap())
}

fn args(pairs: &[(&str, &str)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), Value::from_entry(v))).collect()
}

fn hanoi(level: &str) -> ExecutionState {
    ExecutionState::start(
        doc(corpus::TOWER_OF_HANOI),
        "towerOfHanoi",
        args(&[("level", level), ("source", "A"), ("target", "C"), ("auxiliary", "B")]),
    )
    .unwrap()
}

fn current_kind(state: &ExecutionState) -> Kind {
    state.current().unwrap().1.kind.kind()
}

fn current_line(state: &ExecutionState) -> u32 {
    state.current_location().unwrap().line
}

fn names(state: &ExecutionState) -> Vec<String> {
    state.visible_variables().into_iter().map(|(n, _)| n).collect()
}

#[test]
fn start_hanoi_waits_on_first_assignment() {
    let state = hanoi("2");
    let (_, stmt) = state.current().unwrap();
    let StatementKind::Assignment { target, .. } = &stmt.kind else {
        panic!("{stmt:?}")
    };
    assert_eq!(target, "topDiscs");
    let pending = state.pending_input().unwrap();
    assert_eq!(pending.kind, InputKind::QueryAnswer);
    assert_eq!(pending.prompt, "SET 'topDiscs' TO 2 minus one");
    assert_eq!(state.events().len(), 1);
    assert_eq!(state.depth(), 1);
}

#[test]
fn start_errors() {
    let err = ExecutionState::start(doc(corpus::TOWER_OF_HANOI), "towerOfHanoi", BTreeMap::new()).unwrap_err();
    assert!(matches!(err, EngineError::ArityMismatch { .. }));
    let err = ExecutionState::start(doc(corpus::TOWER_OF_HANOI), "nope", BTreeMap::new()).unwrap_err();
    assert_eq!(err.code(), "UnknownStrategy");
    let bad = doc("STRATEGY s ()\n  DO t()\n");
    let err = ExecutionState::start(bad, "s", BTreeMap::new()).unwrap_err();
    assert_eq!(err.code(), "ValidationFailed");
}

#[test]
fn start_debug_with_no_bindings() {
    let state = ExecutionState::start(doc(corpus::DEBUG), "debug", BTreeMap::new()).unwrap();
    assert_eq!(state.depth(), 1);
    assert!(state.current_frame().bindings.is_empty());
    assert_eq!(state.current_frame().pc, [0]);
    assert_eq!(current_kind(&state), Kind::Conditional);
}

#[test]
fn false_condition_skips_block() {
    let mut state = hanoi("1");
    state.next(Some(HumanInput::answer("0"))).unwrap();
    assert_eq!(current_kind(&state), Kind::Conditional);
    let first_if = current_line(&state);
    state.next(Some(HumanInput::Decision(false))).unwrap();
    assert_eq!(current_kind(&state), Kind::Conditional);
    assert!(current_line(&state) > first_if + 2);
}

#[test]
fn comma_answer_becomes_list() {
    let mut state = hanoi("2");
    state.next(Some(HumanInput::answer("alpha, beta"))).unwrap();
    assert_eq!(
        state.current_frame().bindings["topDiscs"],
        Value::List(vec!["alpha".into(), "beta".into()])
    );
}

#[test]
fn call_pushes_frame_with_only_callee_params() {
    let mut state = hanoi("2");
    state.next(Some(HumanInput::answer("1"))).unwrap();
    state.next(Some(HumanInput::Decision(true))).unwrap();
    assert_eq!(current_kind(&state), Kind::Call);
    assert_eq!(state.status(), Status::ReadyToAdvance);
    state.next(None).unwrap();
    assert_eq!(state.depth(), 2);
    let visible = state.visible_variables();
    assert_eq!(
        visible,
        [
            ("auxiliary".into(), Value::text("C")),
            ("level".into(), Value::text("1")),
            ("source".into(), Value::text("A")),
            ("target".into(), Value::text("B")),
        ]
    );
}

#[test]
fn input_errors_leave_state_unchanged() {
    let mut state = hanoi("2");
    let before = state.observe();
    let e = state.next(Some(HumanInput::Decision(true))).unwrap_err();
    assert_eq!(e.code(), "InputKindMismatch");
    assert_eq!(state.next(None).unwrap_err().code(), "MissingInput");
    assert_eq!(state.observe(), before);
    assert_eq!(state.events().len(), 1);
}

#[test]
fn previous_at_start_fails() {
    let mut state = hanoi("2");
    assert!(matches!(state.previous(), Err(EngineError::AtStart)));
    assert_eq!(state.events().len(), 1);
}

#[test]
fn undo_hides_unreferenced_variable() {
    let doc = doc(corpus::RENAME_VARIABLE);
    let mut state = ExecutionState::start(doc, "renameVariable", args(&[("name", "speed")])).unwrap();
    assert_eq!(state.visible_variables(), [("name".into(), Value::text("speed"))]);
    state.next(Some(HumanInput::answer("a.rs:1, a.rs:7"))).unwrap();
    assert!(names(&state).contains(&"codeLines".to_string()));
    assert!(!names(&state).contains(&"docLines".to_string()));
    state.previous().unwrap();
    assert_eq!(names(&state), ["name"]);
    assert_eq!(state.status(), rename_start_status());
}

fn rename_start_status() -> Status {
    let doc = doc(corpus::RENAME_VARIABLE);
    ExecutionState::start(doc, "renameVariable", args(&[("name", "speed")])).unwrap().status()
}

/// debug with one logged output variable bound to ["a","b","c"], stepped
/// until the loop has bound `line` to `upto`.
fn debug_in_loop(upto: &str) -> ExecutionState {
    let mut state = ExecutionState::start(doc(corpus::DEBUG), "debug", BTreeMap::new()).unwrap();
    state.next(Some(HumanInput::Decision(true))).unwrap();
    state.next(Some(HumanInput::answer("a, b, c"))).unwrap();
    state.next(Some(HumanInput::Decision(false))).unwrap();
    loop {
        assert_eq!(current_kind(&state), Kind::ForEach);
        state.next(Some(HumanInput::Ack)).unwrap();
        if state.current_frame().bindings["line"] == Value::text(upto) {
            return state;
        }
        // Line did not execute: back to the loop head.
        state.next(Some(HumanInput::Decision(false))).unwrap();
    }
}

#[test]
fn editing_consumed_element_is_locked() {
    let mut state = debug_in_loop("b");
    let before = state.observe();
    let err = state.set_variable("outputLines", Value::list(["x", "b", "c"])).unwrap_err();
    assert_eq!(err, EngineError::LoopElementLocked { name: "outputLines".into(), consumed: 2 });
    let err = state.set_variable("outputLines", Value::list(["a"])).unwrap_err();
    assert_eq!(err.code(), "LoopElementLocked");
    assert_eq!(state.observe(), before);
}

#[test]
fn appended_element_is_visited() {
    let mut state = debug_in_loop("b");
    state.set_variable("outputLines", Value::list(["a", "b", "c", "d"])).unwrap();
    let mut seen = Vec::new();
    state.next(Some(HumanInput::Decision(false))).unwrap();
    while current_kind(&state) == Kind::ForEach && state.status() != Status::ReadyToAdvance {
        state.next(Some(HumanInput::Ack)).unwrap();
        seen.push(state.current_frame().bindings["line"].to_string());
        state.next(Some(HumanInput::Decision(false))).unwrap();
    }
    assert_eq!(seen, ["c", "d"]);
    // Exhausted head advances without input to the final RETURN.
    state.next(None).unwrap();
    assert_eq!(current_kind(&state), Kind::Return);
}

#[test]
fn identical_edit_only_logs_an_event() {
    let mut state = hanoi("2");
    let before = state.observe();
    state.set_variable("level", Value::text("2")).unwrap();
    assert_eq!(state.observe(), before);
    assert_eq!(state.events().len(), 2);
    assert_eq!(state.set_variable("topDiscs", Value::Nothing).unwrap_err().code(), "UnknownOrHiddenVariable");
}

#[test]
fn edit_is_undone_with_its_step() {
    let mut state = hanoi("3");
    state.next(Some(HumanInput::answer("2"))).unwrap();
    state.set_variable("level", Value::text("9")).unwrap();
    state.next(Some(HumanInput::Decision(false))).unwrap();
    state.previous().unwrap();
    assert!(state.visible_variables().contains(&("level".into(), Value::text("3"))));
}

#[test]
fn visibility_tracks_references() {
    let doc = doc(corpus::RENAME_VARIABLE);
    let mut state = ExecutionState::start(doc, "renameVariable", args(&[("name", "speed")])).unwrap();
    state.next(Some(HumanInput::answer("nothing"))).unwrap();
    // codeLines is Nothing: the loop is skipped without input.
    assert_eq!(state.status(), Status::ReadyToAdvance);
    state.next(None).unwrap();
    assert!(!names(&state).contains(&"docLines".to_string()));
    state.next(Some(HumanInput::answer("README:3"))).unwrap();
    assert!(names(&state).contains(&"docLines".to_string()));
}

#[test]
fn responsibility_steps_per_kind() {
    let mut state = hanoi("2");
    state.next(Some(HumanInput::answer("1"))).unwrap();
    let steps = state.responsibility_steps().unwrap();
    let actors: Vec<Actor> = steps.iter().map(|s| s.actor).collect();
    assert_eq!(
        actors,
        [Actor::Developer, Actor::Developer, Actor::Developer, Actor::Computer, Actor::Computer]
    );
    let action = roboto_core::engine::responsibilities_for(Kind::Action);
    let actors: Vec<Actor> = action.iter().map(|s| s.actor).collect();
    assert_eq!(actors, [Actor::Developer, Actor::Developer, Actor::Computer]);

    let mut done = ExecutionState::start(doc("STRATEGY s ()\n  A\n"), "s", BTreeMap::new()).unwrap();
    done.next(Some(HumanInput::Ack)).unwrap();
    assert!(done.is_completed());
    assert_eq!(done.responsibility_steps().unwrap_err(), EngineError::SessionCompleted);
    assert_eq!(done.next(Some(HumanInput::Ack)).unwrap_err(), EngineError::SessionCompleted);
}

#[test]
fn hanoi_traces_match_closed_forms() {
    checks::hanoi_traces().unwrap();
}

#[test]
fn hanoi_level_three_as_printed() {
    let d = doc(corpus::TOWER_OF_HANOI);
    let trace = run_scripted(d, "towerOfHanoi", arg_map(&scripts::hanoi_args(3)), &scripts::hanoi(3, false)).unwrap();
    assert_eq!(trace.count(|e| e.kind == Kind::Action), 3);
    assert_eq!(trace.max_depth(), 3);
    assert_eq!(trace.completed_value(), Some(&Value::Nothing));
}

#[test]
fn tdd_loop_semantics() {
    checks::loop_semantics().unwrap();
}

#[test]
fn debug_returns_scripted_line() {
    let trace = run_scripted(doc(corpus::DEBUG), "debug", BTreeMap::new(), &scripts::debug_found_line("app.js:42")).unwrap();
    assert_eq!(trace.completed_value(), Some(&Value::text("app.js:42")));
}

#[test]
fn debug_delegates_to_localize_wrong_value() {
    use HumanInput::*;
    let script = [
        Decision(true),
        HumanInput::answer("app.js:42"),
        Decision(false),
        Ack,
        Decision(true),
        Ack,
        Decision(false),
        Decision(true),
        HumanInput::answer("x"),
        // localizeWrongValue('wrongValue')
        HumanInput::answer("app.js:10"),
        Ack,
        Decision(true),
        Decision(true),
        Ack,
    ];
    let trace = run_scripted(doc(corpus::DEBUG), "debug", BTreeMap::new(), &script).unwrap();
    assert_eq!(trace.max_depth(), 2);
    assert_eq!(trace.completed_value(), Some(&Value::text("app.js:10")));
}

#[test]
fn script_failures() {
    let d = doc(corpus::TOWER_OF_HANOI);
    let err = run_scripted(d.clone(), "towerOfHanoi", arg_map(&scripts::hanoi_args(2)), &scripts::hanoi(2, false)[..3])
        .unwrap_err();
    assert!(matches!(err.error, EngineError::ScriptExhausted(_)));
    assert!(!err.trace.entries.is_empty());
    let err = run_scripted(d, "towerOfHanoi", arg_map(&scripts::hanoi_args(2)), &[HumanInput::Ack]).unwrap_err();
    assert_eq!(err.error.code(), "ScriptKindMismatch");
}

#[test]
fn snapshot_round_trips() {
    let state = hanoi("2");
    let restored = ExecutionState::from_snapshot(&state.to_snapshot(), state.doc().clone()).unwrap();
    assert_eq!(restored.observe(), state.observe());
    assert_eq!(restored.events(), state.events());
    assert_eq!(restored.to_snapshot(), state.to_snapshot());
    checks::persistence_round_trip().unwrap();
}

#[test]
fn snapshot_rejections() {
    let state = hanoi("2");
    let bytes = state.to_snapshot();
    let mut json: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    json["version"] = (SNAPSHOT_VERSION + 1).into();
    let err = ExecutionState::from_snapshot(&serde_json::to_vec(&json).unwrap(), state.doc().clone()).unwrap_err();
    assert_eq!(err, EngineError::FormatVersionMismatch { found: SNAPSHOT_VERSION + 1, expected: SNAPSHOT_VERSION });
    let err = ExecutionState::from_snapshot(&bytes, doc(corpus::RENAME_VARIABLE)).unwrap_err();
    assert_eq!(err, EngineError::DocMismatch);
    let err = ExecutionState::from_snapshot(b"{", state.doc().clone()).unwrap_err();
    assert_eq!(err.code(), "CorruptPayload");
}

#[test]
fn replay_rebuilds_state() {
    let mut state = hanoi("2");
    state.next(Some(HumanInput::answer("1"))).unwrap();
    state.set_variable("topDiscs", Value::text("one")).unwrap();
    state.next(Some(HumanInput::Decision(true))).unwrap();
    state.previous().unwrap();
    let replayed = ExecutionState::replay(state.doc().clone(), state.events()).unwrap();
    assert_eq!(replayed.observe(), state.observe());
    assert_eq!(replayed.view(), state.view());
    let mut broken = state.events().to_vec();
    broken.remove(1);
    assert_eq!(
        ExecutionState::replay(state.doc().clone(), &broken).unwrap_err().code(),
        "CorruptEventLog"
    );
}

#[test]
fn deep_self_recursion_overflows() {
    let d = doc("STRATEGY s ()\n  DO s()\n");
    let mut state = ExecutionState::start(d, "s", BTreeMap::new()).unwrap();
    let err = loop {
        if let Err(e) = state.next(None) {
            break e;
        }
    };
    assert_eq!(err.code(), "StackOverflow");
    assert_eq!(state.depth(), roboto_core::engine::MAX_STACK_DEPTH);
}

#[test]
fn view_marks_one_current_statement() {
    let state = hanoi("2");
    let view = state.view();
    assert_eq!(view.statements.iter().filter(|s| s.current).count(), 1);
    assert!(!view.can_step_back);
    assert_eq!(view.params, ["level", "source", "target", "auxiliary"]);
    let json = serde_json::to_value(&view).unwrap();
    assert_eq!(json["pendingInput"]["kind"], "QueryAnswer");
    assert_eq!(json["status"]["kind"], "AwaitingInput");
}
