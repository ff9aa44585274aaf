//! Input scripts: hand-derived ones for the corpus strategies and random
//! responders for generated documents.

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

use roboto_core::engine::{HumanInput, Value};

use crate::reference::Want;

fn answer(text: &str) -> HumanInput {
    HumanInput::Answer(Value::from_entry(text))
}

/// Inputs for `towerOfHanoi` at `level`, answering every query truthfully.
/// Built from the strategy's structure alone: set topDiscs, two guarded
/// recursive calls, and the Move action either inside the first guard
/// (as printed) or between the guards (corrected).
pub fn hanoi(level: u32, corrected: bool) -> Vec<HumanInput> {
    let mut out = Vec::new();
    hanoi_into(level, corrected, &mut out);
    out
}

fn hanoi_into(level: u32, corrected: bool, out: &mut Vec<HumanInput>) {
    let recurse = level > 1;
    out.push(answer(&(level.saturating_sub(1)).to_string()));
    out.push(HumanInput::Decision(recurse));
    if recurse {
        hanoi_into(level - 1, corrected, out);
        if !corrected {
            out.push(HumanInput::Ack);
        }
    }
    if corrected {
        out.push(HumanInput::Ack);
    }
    out.push(HumanInput::Decision(recurse));
    if recurse {
        hanoi_into(level - 1, corrected, out);
    }
}

/// Move actions executed at `level`.
pub fn hanoi_moves(level: u32, corrected: bool) -> u64 {
    if corrected {
        (1u64 << level) - 1
    } else {
        (1u64 << (level - 1)) - 1
    }
}

pub fn hanoi_args(level: u32) -> Vec<(String, Value)> {
    [
        ("level", level.to_string()),
        ("source", "A".into()),
        ("target", "C".into()),
        ("auxiliary", "B".into()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), Value::Text(v)))
    .collect()
}

/// One pass through the TDD loop body with every UNTIL satisfied on first
/// ask and no design or performance issues.
pub fn tdd_iteration() -> Vec<HumanInput> {
    use HumanInput::*;
    vec![
        Ack,
        Ack,
        Decision(true),
        Ack,
        Ack,
        Decision(true),
        Answer(Value::Nothing),
        Decision(true),
        Answer(Value::Nothing),
        Decision(true),
    ]
}

/// TDD with the given scenarios answer, running every iteration.
pub fn tdd(scenarios: &str) -> Vec<HumanInput> {
    let n = Value::from_entry(scenarios).items().len();
    let mut out = vec![answer(scenarios)];
    for _ in 0..n {
        out.extend(tdd_iteration());
    }
    out
}

/// The debug strategy, following the logged-output path to a single line
/// that turns out to be the defect.
pub fn debug_found_line(line: &str) -> Vec<HumanInput> {
    use HumanInput::*;
    vec![
        Decision(true),
        Answer(Value::Text(line.into())),
        Decision(false),
        Ack,
        Decision(true),
        Ack,
        Decision(true),
        Ack,
    ]
}

const ANSWERS: &[&str] = &["alpha", "beta", "x = 1", "42", "", "it's done"];

fn random_value(rng: &mut StdRng) -> Value {
    match rng.random_range(0..10) {
        0 | 1 => Value::Nothing,
        2..=5 => Value::Text(ANSWERS.choose(rng).unwrap().to_string()),
        _ => {
            let n = rng.random_range(0..=3);
            Value::List(
                (0..n)
                    .map(|i| format!("{}{i}", ANSWERS[..4].choose(rng).unwrap()))
                    .collect(),
            )
        }
    }
}

/// A responder that supplies well-typed random inputs until `cap` have
/// been given. UNTIL queries lean towards true so loops tend to end.
pub fn random_responder(rng: &mut StdRng, cap: usize) -> impl FnMut(Want) -> Option<HumanInput> + '_ {
    let mut given = 0;
    move |want| {
        if given >= cap {
            return None;
        }
        given += 1;
        Some(match want {
            Want::Ack => HumanInput::Ack,
            Want::Decision { until } => HumanInput::Decision(rng.random_bool(if until { 0.65 } else { 0.5 })),
            Want::Answer => HumanInput::Answer(random_value(rng)),
        })
    }
}
