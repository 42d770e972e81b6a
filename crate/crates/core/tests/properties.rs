mod common;

use proptest::prelude::*;

use tfsmt::format::{parse_machine, parse_suite, print_machine, print_suite};
use tfsmt::oracle::enumerate_mutants;
use tfsmt::random::{random_fault_model, RandomParams};
use tfsmt::{FaultModel, TestSuite};

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn invariants_hold_on_small_machines(seed in any::<u64>()) {
        if let Err(e) = common::check_seed(seed) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn count_matches_enumeration(seed in any::<u64>()) {
        let m = common::small_model(seed);
        let all = enumerate_mutants(&m, 100_000).unwrap();
        prop_assert_eq!(m.count_mutants(), all.len().into());
    }

    #[test]
    fn extraction_is_idempotent(seed in any::<u64>()) {
        let m = common::small_model(seed);
        for p in enumerate_mutants(&m, 100_000).unwrap() {
            prop_assert_eq!(m.extract_submachine(&p), p);
        }
    }

    #[test]
    fn machines_round_trip_through_text(seed in any::<u64>()) {
        let m = common::small_model(seed);
        let text = print_machine(&m);
        prop_assert_eq!(print_machine(&parse_machine(&text).unwrap()), text);
    }

    #[test]
    fn suites_round_trip_through_text(seed in any::<u64>()) {
        let m = common::small_model(seed);
        let suite: TestSuite = common::random_tests(&m, seed, 5).into_iter().collect();
        let text = print_suite(&m, &suite);
        prop_assert_eq!(parse_suite(&m, &text).unwrap(), suite);
    }
}

#[test]
fn random_generation_is_deterministic() {
    let p = RandomParams::default();
    assert_eq!(
        print_machine(&random_fault_model(&p, 7)),
        print_machine(&random_fault_model(&p, 7))
    );
}

#[test]
fn fault_models_build_for_many_seeds() {
    for seed in 0..50 {
        FaultModel::new(common::small_model(seed)).unwrap();
    }
}
