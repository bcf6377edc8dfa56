use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ybx::cli_harness::{bundled, random_skew_symmetric_pair, SpecFile};
use ybx::double_bracket::{
    bracket, check_double_jacobi, check_quadratic_relations, check_skew, loday_bracket, matrix_algebra_m2, random_poly,
    random_skew_constant, BracketSpec, Structure,
};
use ybx::exact_tensor::{q, Ring};
use ybx::free_ncalgebra::{cyclic_reduce, inner_act, mu, multiply, outer_act, NcPoly, NcWord, SweedlerElement};
use ybx::trace_poisson::{check_hamiltonian_form, check_jacobi, permute_colors, poisson, random_rep_poly, trace_word};

fn quadratic_example() -> BracketSpec {
    match bundled("quadratic_m2.json") {
        SpecFile::Bracket(b) => b,
        _ => unreachable!("bundled quadratic example"),
    }
}

fn word(max_len: usize, m: u16) -> impl Strategy<Value = NcWord> {
    prop::collection::vec(0..m, 0..=max_len).prop_map(NcWord)
}

fn poly(seed: u64, m: usize, degree: usize) -> NcPoly {
    random_poly(&mut ChaCha8Rng::seed_from_u64(seed), m, degree, 3)
}

fn sweedler(seed: u64, m: usize) -> SweedlerElement {
    SweedlerElement::tensor(&[poly(seed, m, 2), poly(seed ^ 0xabcd, m, 2)])
}

/// Specs that pass (db): random skew constants, the matrix algebra, the bundled quadratic.
fn passing_specs(seed: u64) -> Vec<BracketSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![random_skew_constant(&mut rng, 3, 4), matrix_algebra_m2(), quadratic_example()]
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(48) })]

    #[test]
    fn trace_kills_commutators(a in word(4, 3), b in word(4, 3)) {
        let ab = NcPoly::word(a.concat(&b));
        let ba = NcPoly::word(b.concat(&a));
        prop_assert!(Ring::is_zero(&cyclic_reduce(&ab.minus(&ba))));
    }

    #[test]
    fn bimodule_actions_are_associative(s in 0u64..1000, t in 0u64..1000) {
        let (a, a2, b, b2) = (poly(s, 2, 2), poly(s + 1, 2, 2), poly(t, 2, 2), poly(t + 1, 2, 2));
        let x = sweedler(s ^ t, 2);
        let lhs = outer_act(&a, &outer_act(&a2, &x, &b2), &b);
        let rhs = outer_act(&multiply(&a, &a2), &x, &multiply(&b2, &b));
        prop_assert_eq!(lhs, rhs);
        let lhs = inner_act(&a, &inner_act(&a2, &x, &b2), &b);
        let rhs = inner_act(&multiply(&a, &a2), &x, &multiply(&b2, &b));
        prop_assert_eq!(lhs, rhs);
        let one = NcPoly::one();
        prop_assert_eq!(mu(&outer_act(&a, &x, &b)), multiply(&multiply(&a, &mu(&x)), &b));
        prop_assert_eq!(mu(&outer_act(&one, &x, &one)), mu(&x));
    }

    #[test]
    fn bracket_is_a_derivation_in_the_right_argument(seed in 0u64..1000) {
        let one = NcPoly::one();
        for spec in passing_specs(seed) {
            let (p, qq, r) = (poly(seed, spec.m, 2), poly(seed + 7, spec.m, 1), poly(seed + 13, spec.m, 1));
            let lhs = bracket(&spec, &p, &multiply(&qq, &r)).unwrap();
            let rhs = outer_act(&qq, &bracket(&spec, &p, &r).unwrap(), &one)
                .plus(&outer_act(&one, &bracket(&spec, &p, &qq).unwrap(), &r));
            prop_assert_eq!(lhs, rhs);
            prop_assert!(check_skew(&spec, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().pass);
        }
    }

    #[test]
    fn induced_bracket_is_lie_on_the_trace_space(seed in 0u64..1000) {
        for spec in passing_specs(seed) {
            prop_assert!(check_double_jacobi(&spec).unwrap().pass);
            let (a, b, c) = (poly(seed, spec.m, 2), poly(seed + 3, spec.m, 2), poly(seed + 5, spec.m, 1));
            let br = |x: &NcPoly, y: &NcPoly| loday_bracket(&spec, x, y).unwrap();
            prop_assert!(Ring::is_zero(&cyclic_reduce(&br(&a, &b).plus(&br(&b, &a)))));
            let jac = br(&a, &br(&b, &c)).plus(&br(&b, &br(&c, &a))).plus(&br(&c, &br(&a, &b)));
            prop_assert!(Ring::is_zero(&cyclic_reduce(&jac)));
        }
    }

    #[test]
    fn trace_bracket_is_an_antisymmetric_biderivation(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for spec in passing_specs(seed) {
            let n = 2;
            let p = random_rep_poly(&mut rng, n, spec.m, 2, 2);
            let qq = random_rep_poly(&mut rng, n, spec.m, 1, 2);
            let r = random_rep_poly(&mut rng, n, spec.m, 1, 2);
            prop_assert_eq!(poisson(&spec, &p, &qq, n), poisson(&spec, &qq, &p, n).negate());
            let lhs = poisson(&spec, &p, &qq.times(&r), n);
            let rhs = qq.times(&poisson(&spec, &p, &r, n)).plus(&poisson(&spec, &p, &qq, n).times(&r));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn hamiltonian_form_matches_random_quadratic_structure(seed in 0u64..1000, n in 1usize..=3) {
        let (r, a) = random_skew_symmetric_pair(2, &mut ChaCha8Rng::seed_from_u64(seed));
        let spec = BracketSpec::new(Structure::Quadratic { r, a }).unwrap();
        prop_assert!(check_hamiltonian_form(&spec, n).pass);
    }
}

#[test]
fn hamiltonian_form_matches_for_linear_and_quadratic() {
    for n in 1..=3 {
        assert!(check_hamiltonian_form(&matrix_algebra_m2(), n).pass);
        assert!(check_hamiltonian_form(&quadratic_example(), n).pass);
    }
}

#[test]
fn trace_jacobi_passes_for_passing_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for spec in passing_specs(4) {
        for n in 1..=2 {
            assert!(check_jacobi(&spec, n, 3, &mut rng).pass, "{:?} N={n}", spec.kind());
        }
    }
}

#[test]
fn r2_violation_is_seen_by_trace_jacobi() {
    let base = quadratic_example();
    let (r, a) = base.quadratic_parts().unwrap();
    let mut a = a.clone();
    a[[0, 0, 0, 1]] = q(1);
    let bad = BracketSpec::new(Structure::Quadratic { r: r.clone(), a }).unwrap();
    assert!(!check_quadratic_relations(&bad).unwrap().pass);
    let rep = check_jacobi(&bad, 2, 3, &mut ChaCha8Rng::seed_from_u64(1));
    assert!(!rep.pass);
    assert!(rep.counterexample.is_some());
}

#[test]
fn trace_bracket_is_invariant_under_color_relabeling() {
    let spec = quadratic_example();
    let n = 2;
    let words = [NcWord(vec![0, 1]), NcWord(vec![1, 1, 0]), NcWord(vec![0])];
    for a in &words {
        for b in &words {
            let br = poisson(&spec, &trace_word(a, n), &trace_word(b, n), n);
            assert_eq!(permute_colors(&br, &[1, 0]), br);
        }
    }
}
