use proptest::prelude::*;
use roboto_testkit::checks::{self, random_case};
use roboto_testkit::{gen, rng};

fn check(name: &str, r: checks::CheckResult, seed: u64) {
    if let Err(msg) = r {
        panic!("{name} failed for seed {seed}: {msg}");
    }
}

#[test]
fn generated_documents_round_trip() {
    for seed in 0..300 {
        let doc = gen::random_doc(&mut rng(seed), gen::GenConfig::round_trip());
        check("round trip", checks::round_trip(&doc), seed);
    }
}

#[test]
fn engine_matches_reference_interpreter() {
    for seed in 0..300 {
        check("oracle equivalence", checks::oracle_equivalence(&random_case(seed)), seed);
    }
}

#[test]
fn stepping_back_restores_start() {
    for seed in 0..150 {
        check("reversibility", checks::reversibility(&random_case(seed), seed), seed);
    }
}

#[test]
fn event_log_replays_to_same_state() {
    for seed in 0..200 {
        check("replay", checks::replay_equivalence(&random_case(seed), seed), seed);
    }
}

#[test]
fn snapshots_survive_every_step() {
    for seed in 0..100 {
        check("snapshot", checks::snapshot_round_trip(&random_case(seed)), seed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scripted_runs_are_deterministic(seed in any::<u64>()) {
        prop_assert_eq!(checks::determinism(&random_case(seed)), Ok(()));
    }

    #[test]
    fn reversibility_holds_for_arbitrary_seeds(seed in any::<u64>()) {
        prop_assert_eq!(checks::reversibility(&random_case(seed), seed), Ok(()));
    }

    #[test]
    fn oracle_equivalence_holds_for_arbitrary_seeds(seed in any::<u64>()) {
        prop_assert_eq!(checks::oracle_equivalence(&random_case(seed)), Ok(()));
    }
}
