//! Shared test support: random documents, a reference interpreter, and
//! input scripts for the corpus strategies.

pub mod checks;
pub mod http;
pub mod gen;
pub mod reference;
pub mod scripts;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::SeedableRng;
use roboto_core::engine::Value;
use roboto_core::syntax::{format, parse, StrategyDoc};

pub use gen::{random_doc, GenConfig};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Formats and reparses a generated document so its statements carry real
/// source locations.
pub fn located(doc: &StrategyDoc) -> Arc<StrategyDoc> {
    Arc::new(parse(&format(doc)).expect("generated documents reparse"))
}

/// Root arguments: every parameter bound to a random-ish value.
pub fn root_args(doc: &StrategyDoc, root: &str, rng: &mut StdRng) -> Vec<(String, Value)> {
    use rand::Rng;
    let strategy = doc.strategy(root).expect("root exists");
    strategy
        .params
        .iter()
        .map(|p| {
            let v = match rng.random_range(0..3) {
                0 => Value::Text(format!("{p}-value")),
                1 => Value::List(vec!["a".into(), "b".into()]),
                _ => Value::Nothing,
            };
            (p.clone(), v)
        })
        .collect()
}

pub fn arg_map(args: &[(String, Value)]) -> BTreeMap<String, Value> {
    args.iter().cloned().collect()
}
