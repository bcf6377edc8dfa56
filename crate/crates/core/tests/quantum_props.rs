use ndarray::Array4;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ybx::classical_rmatrix::{check_reflection_form, search_quadratic};
use ybx::cli_harness::{bundled, random_skew_symmetric_pair, SpecFile};
use ybx::exact_tensor::{q, Kind, QTensor};
use ybx::quantum_reflection::{
    build_decoupled, build_r, check_classical_limit, check_decoupled_color, check_decoupled_flavor, check_gauge_invariance,
    check_qybe, check_relation_equivalence, check_unitarity, flip_color_blocks, gauge_transform, random_flavor_invertible,
    random_system, ABCDSystem, EquivalenceMode,
};

/// Unitary solutions of the flavor Yang–Baxter equation: P, 𝕀, −P.
fn flavor_rtilde(which: usize, m: usize) -> QTensor {
    let p = QTensor::flip("f1", "f2", m, Kind::Flavor);
    match which {
        0 => p,
        1 => QTensor::identity(&[("f1", m, Kind::Flavor), ("f2", m, Kind::Flavor)]),
        _ => p.scale_left(&q(-1)),
    }
}

fn decoupled(seed: u64, which: usize) -> ABCDSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_flavor_invertible(2, &mut rng);
    let g = random_flavor_invertible(2, &mut rng);
    build_decoupled(flip_color_blocks(2), &f, &flavor_rtilde(which, 2), Some(&g)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(6) })]

    #[test]
    fn decoupled_systems_solve_qybe_and_unitarity(seed in 0u64..1000, which in 0usize..3) {
        let sys = decoupled(seed, which);
        prop_assert!(check_decoupled_color(&sys).unwrap().pass);
        let flavor = check_decoupled_flavor(&sys).unwrap();
        prop_assert!(flavor.pass);
        prop_assert_eq!(&flavor.info["reconstructs_input_rtilde"], &serde_json::json!(true));
        let r = build_r(&sys).unwrap();
        prop_assert!(check_qybe(&r).unwrap().pass);
        prop_assert!(check_unitarity(&sys).unwrap().pass);
    }

    #[test]
    fn gauge_leaves_r_unchanged(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(2, 2, &mut rng);
        let g = random_flavor_invertible(2, &mut rng);
        let rep = check_gauge_invariance(&sys, &g).unwrap();
        prop_assert!(rep.pass, "{}", rep.to_text(false));
    }

    #[test]
    fn bivector_form_matches_matrix_relation(seed in 0u64..1000) {
        let sys = random_system(2, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let rep = check_relation_equivalence(&sys, EquivalenceMode::Both).unwrap();
        prop_assert!(rep.pass, "{}", rep.to_text(false));
    }

    #[test]
    fn two_relations_coincide_at_m1(seed in 0u64..1000, n in 1usize..=2) {
        let sys = random_system(n, 1, &mut ChaCha8Rng::seed_from_u64(seed));
        let rep = check_relation_equivalence(&sys, EquivalenceMode::Both).unwrap();
        prop_assert!(rep.pass);
        prop_assert_eq!(&rep.info["etoile2_distinct"], &serde_json::json!(false));
    }

    #[test]
    fn classical_limit_structure_holds(seed in 0u64..1000) {
        let (r, a) = random_skew_symmetric_pair(2, &mut ChaCha8Rng::seed_from_u64(seed));
        let rep = check_classical_limit(&r, &a, 2).unwrap();
        for tag in ["order-hbar0", "Y-cancels", "order-hbar1 determines bracket"] {
            prop_assert!(rep.parts.iter().any(|p| p.tag == tag && p.pass), "{tag}");
        }
        prop_assert_eq!(&rep.info["order-hbar1=rX1X2+(X2tX1t rtilde21)^t12+a-terms"], &serde_json::json!(true));
    }
}

#[test]
fn bundled_decoupled_document_is_consistent() {
    let SpecFile::Abcd(sys) = bundled("decoupled_flip_n2m2.json") else { panic!("bundled decoupled example") };
    assert!(sys.decoupled.is_some());
    assert!(check_qybe(&build_r(&sys).unwrap()).unwrap().pass);
    assert!(check_unitarity(&sys).unwrap().pass);
}

#[test]
fn gauge_moves_the_blocks_but_not_r() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let sys = random_system(2, 2, &mut rng);
    let g = random_flavor_invertible(2, &mut rng);
    let moved = gauge_transform(&sys, &g).unwrap();
    assert!(!moved.a.equals(&sys.a));
    assert!(build_r(&moved).unwrap().equals(&build_r(&sys).unwrap()));
}

#[test]
fn random_system_is_not_a_qybe_solution() {
    let SpecFile::Abcd(sys) = bundled("abcd_random_n2m2.json") else { panic!("bundled random example") };
    assert!(!check_qybe(&build_r(&sys).unwrap()).unwrap().pass);
}

#[test]
fn classical_limit_without_r_matches_reflection_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..4 {
        let (_, a) = random_skew_symmetric_pair(2, &mut rng);
        let r = Array4::from_elem((2, 2, 2, 2), q(0));
        assert!(check_classical_limit(&r, &a, 2).unwrap().pass);
    }
}

#[test]
fn classical_limit_on_search_solutions() {
    let specs = search_quadratic(2, &[-1, 0, 1], 2, 1_000_000, 0).specs;
    for spec in &specs {
        let (r, a) = spec.quadratic_parts().unwrap();
        let lim = check_classical_limit(r, a, 2).unwrap();
        let unhalved = &lim.info["order-hbar1=rX1X2+(X2tX1t rtilde21)^t12+a-terms"];
        assert_eq!(unhalved, &serde_json::json!(true));
        if r.iter().all(|x| *x == q(0)) {
            assert!(lim.pass && check_reflection_form(spec, 2).unwrap().pass);
        }
    }
}
