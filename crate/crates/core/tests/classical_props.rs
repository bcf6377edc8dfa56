use ndarray::{Array3, Array4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use ybx::classical_rmatrix::{
    aybe_star_tensor, aybe_tensor, check_aybe, check_aybe_star, check_cybe_adjoint, check_cybe_skew,
    check_linear_assoc_matrix, check_linear_matrix_form, check_quadratic_matrix_form, is_skew, search_quadratic,
};
use ybx::cli_harness::random_skew_symmetric_pair;
use ybx::double_bracket::{check_linear_assoc, check_quadratic_relations, matrix_algebra_m2, BracketSpec, Structure};
use ybx::exact_tensor::{q, Q};
use ybx::quantum_reflection::relabel;
use ybx::trace_poisson::check_jacobi;

fn catalog() -> &'static [BracketSpec] {
    static SPECS: OnceLock<Vec<BracketSpec>> = OnceLock::new();
    SPECS.get_or_init(|| search_quadratic(2, &[-1, 0, 1], 3, 1_000_000, 0).specs)
}

fn random_linear(m: usize, rng: &mut impl Rng) -> BracketSpec {
    let b = Array3::from_shape_fn((m, m, m), |_| q(rng.gen_range(-2..=2)));
    BracketSpec::new(Structure::Linear { b }).unwrap()
}

fn random_skew_r(m: usize, rng: &mut impl Rng) -> Array4<Q> {
    random_skew_symmetric_pair(m, rng).0
}

#[test]
fn search_catalog_is_nonempty_and_sound() {
    let specs = catalog();
    assert!(specs.iter().any(|s| !s.is_trivial()));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for spec in specs {
        assert!(check_quadratic_relations(spec).unwrap().pass);
        assert!(check_jacobi(spec, 2, 3, &mut rng).pass);
    }
}

#[test]
fn aybe_solutions_in_catalog_solve_skew_cybe() {
    let mut seen = 0;
    for spec in catalog() {
        let (r, _) = spec.quadratic_parts().unwrap();
        if is_skew(r) && check_aybe(r).unwrap().pass {
            seen += 1;
            for n in 1..=2 {
                assert!(check_cybe_skew(spec, n).unwrap().pass);
            }
            let star = check_aybe_star(r).unwrap();
            assert!(star.pass, "{}", star.to_text(false));
        }
    }
    assert!(seen > 0);
}

#[test]
fn symmetric_a_solutions_solve_cybe_adjoint() {
    let mut seen = 0;
    for spec in catalog().iter().filter(|s| s.a_is_symmetric()) {
        seen += 1;
        for n in 1..=2 {
            assert!(check_cybe_adjoint(spec, n).unwrap().pass);
        }
    }
    assert!(seen > 0);
}

#[test]
fn cybe_adjoint_needs_symmetric_a() {
    let r = Array4::from_elem((2, 2, 2, 2), q(0));
    let mut a = r.clone();
    a[[0, 1, 0, 0]] = q(1);
    let spec = BracketSpec::unchecked(Structure::Quadratic { r, a }).unwrap();
    assert!(check_cybe_adjoint(&spec, 2).is_err());
}

#[test]
fn matrix_algebra_satisfies_linear_matrix_forms() {
    let spec = matrix_algebra_m2();
    assert!(check_linear_assoc(&spec).unwrap().pass);
    for n in 1..=2 {
        assert!(check_linear_assoc_matrix(&spec, n).unwrap().pass);
        assert!(check_linear_matrix_form(&spec, n).unwrap().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(12) })]

    #[test]
    fn linear_matrix_form_agrees_componentwise(seed in 0u64..1000, n in 1usize..=3, m in 1usize..=3) {
        let spec = random_linear(m, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(check_linear_matrix_form(&spec, n).unwrap().pass);
        let assoc = check_linear_assoc(&spec).unwrap().pass;
        prop_assert_eq!(check_linear_assoc_matrix(&spec, n).unwrap().pass, assoc);
    }

    #[test]
    fn quadratic_matrix_form_agrees_componentwise(seed in 0u64..1000, n in 1usize..=2, m in 1usize..=3) {
        let (r, a) = random_skew_symmetric_pair(m, &mut ChaCha8Rng::seed_from_u64(seed));
        let spec = BracketSpec::new(Structure::Quadratic { r, a }).unwrap();
        prop_assert!(check_quadratic_matrix_form(&spec, n).unwrap().pass);
    }

    #[test]
    fn aybe_star_is_minus_aybe_for_skew_r(seed in 0u64..1000, m in 1usize..=3) {
        let r = random_skew_r(m, &mut ChaCha8Rng::seed_from_u64(seed));
        let ay = aybe_tensor(&r).unwrap();
        let star = aybe_star_tensor(&r).unwrap();
        prop_assert!(star.equals(&ay.scale_left(&q(-1))));
        let p13 = relabel(&ay, &[("f1", "f3"), ("f3", "f1")]).unwrap();
        prop_assert_eq!(p13.is_zero(), star.is_zero());
        prop_assert_eq!(check_aybe_star(&r).unwrap().parts[0].pass, check_aybe(&r).unwrap().pass);
    }
}

#[test]
fn quadratic_matrix_form_agrees_at_n3() {
    for seed in 0..2 {
        let (r, a) = random_skew_symmetric_pair(2, &mut ChaCha8Rng::seed_from_u64(seed));
        let spec = BracketSpec::new(Structure::Quadratic { r, a }).unwrap();
        assert!(check_quadratic_matrix_form(&spec, 3).unwrap().pass);
    }
}
