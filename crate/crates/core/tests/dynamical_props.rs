use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ybx::dynamical_shift::{
    check_confluence, check_dyr_equivalence, check_shift_identities, cross_shift, dyr_relation, expand_dtral, normalize,
    random_dyn_system, random_zero_weight, shift_free_relation, Criterion3Mode, WeightScheme,
};
use ybx::exact_tensor::{q, Kind, Q};

const SIGNATURES: [(i64, i64); 3] = [(-1, 1), (-1, 0), (-1, -1)];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn shift_identities_hold_on_a_hundred_samples() {
    let rep = check_shift_identities(100, &mut rng(0)).unwrap();
    assert!(rep.pass, "{}", rep.to_text(false));
    assert!(rep.parts.len() >= 9);
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(16) })]

    #[test]
    fn cross_shift_round_trip(seed in 0u64..1000, n in 1usize..=3, ea in -2i64..=2, eb in -2i64..=2) {
        let ws = WeightScheme::standard(n, 0);
        let (ea, eb) = (q(ea), q(eb));
        let spaces = [("c1", n, Kind::Color), ("c2", n, Kind::Color)];
        let m = random_zero_weight(&spaces, &[("c1", ea.clone()), ("c2", eb.clone())], &ws, 2, &mut rng(seed));
        let there = cross_shift(&m, "c1", &ea, "c2", &eb, &ws).unwrap();
        let back = cross_shift(&there, "c1", &-&ea, "c2", &-&eb, &ws).unwrap();
        prop_assert!(back.equals(&m));
    }

    #[test]
    fn bivector_theorem_for_all_signatures(seed in 0u64..1000, which in 0usize..3) {
        let (er, el) = SIGNATURES[which];
        let sys = random_dyn_system(2, 0, (q(er), q(el), q(0)), 1, &mut rng(seed));
        let rep = check_dyr_equivalence(&sys).unwrap();
        prop_assert!(rep.pass, "{}", rep.to_text(false));
    }

    #[test]
    fn normalization_ignores_multiplication_order(seed in 0u64..1000, which in 0usize..3) {
        let (er, el) = SIGNATURES[which];
        let mut r = rng(seed);
        let sys = random_dyn_system(2, 0, (q(er), q(el), q(0)), 1, &mut r);
        prop_assert!(check_confluence(&sys, 3, &mut r).unwrap().pass);
    }
}

#[test]
fn bivector_theorem_at_quadratic_lambda_degree() {
    let sys = random_dyn_system(2, 0, (q(-1), q(1), q(0)), 2, &mut rng(3));
    assert!(check_dyr_equivalence(&sys).unwrap().pass);
}

#[test]
fn non_zero_weight_input_is_rejected() {
    let mut sys = random_dyn_system(2, 0, (q(-1), q(-1), q(0)), 1, &mut rng(5));
    sys.b = sys.a.clone();
    assert!(check_dyr_equivalence(&sys).is_err());
}

#[test]
fn vanishing_epsilons_remove_every_shift() {
    for m in [0, 2] {
        let ef: Q = q(0);
        let sys = random_dyn_system(2, m, (q(0), q(0), ef), 1, &mut rng(m as u64));
        let with = normalize(&dyr_relation(&sys, Criterion3Mode::Narrow).unwrap()).unwrap();
        let without = normalize(&shift_free_relation(&sys).unwrap()).unwrap();
        assert_eq!(with.first_difference(&without), None);
    }
}

#[test]
fn semi_dynamical_case_has_no_primed_shifts() {
    let sys = random_dyn_system(2, 2, (q(-1), q(0), q(1)), 1, &mut rng(8));
    let narrow = expand_dtral(&sys, Criterion3Mode::Narrow).unwrap();
    let broad = expand_dtral(&sys, Criterion3Mode::Broad).unwrap();
    assert_eq!(narrow.first_difference(&broad), None);
    let flat = random_dyn_system(2, 0, (q(-1), q(0), q(0)), 1, &mut rng(8));
    assert!(check_dyr_equivalence(&flat).unwrap().pass);
}

#[test]
fn criterion3_modes_differ_when_left_shifts_are_present() {
    let sys = random_dyn_system(2, 2, (q(-1), q(1), q(1)), 1, &mut rng(11));
    let narrow = expand_dtral(&sys, Criterion3Mode::Narrow).unwrap();
    let broad = expand_dtral(&sys, Criterion3Mode::Broad).unwrap();
    assert!(narrow.first_difference(&broad).is_some());
}
