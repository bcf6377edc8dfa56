use proptest::prelude::*;
use ybx::exact_tensor::{q, Axis, HbarJet, Kind, QTensor, Ring, Q};

fn small_q() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

/// Tensor with labels t0.. and the given dimensions.
fn tensor_with(dims: Vec<usize>) -> impl Strategy<Value = QTensor> {
    let len: usize = dims.iter().product();
    prop::collection::vec(small_q(), len).prop_map(move |data| {
        let axes = dims.iter().enumerate().map(|(k, &d)| Axis::new(format!("t{k}"), d, Kind::Color)).collect();
        QTensor::new(axes, data).unwrap()
    })
}

fn any_tensor() -> impl Strategy<Value = QTensor> {
    prop::collection::vec(1usize..=3, 1..=4).prop_flat_map(tensor_with)
}

/// Operator on spaces "a" (dim da) and "b" (dim db).
fn operator(da: usize, db: usize) -> impl Strategy<Value = QTensor> {
    prop::collection::vec(-3i64..=3, da * da * db * db).prop_map(move |v| {
        let axes = vec![
            Axis::row("a", da, Kind::Color),
            Axis::col("a", da, Kind::Color),
            Axis::row("b", db, Kind::Flavor),
            Axis::col("b", db, Kind::Flavor),
        ];
        QTensor::new(axes, v.into_iter().map(q).collect()).unwrap()
    })
}

fn jet() -> impl Strategy<Value = HbarJet<Q>> {
    (small_q(), small_q()).prop_map(|(a, b)| HbarJet::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn permutation_round_trip((t, perm) in any_tensor().prop_flat_map(|t| {
        let r = t.rank();
        (Just(t), Just((0..r).collect::<Vec<_>>()).prop_shuffle())
    })) {
        let labels: Vec<String> = t.labels().iter().map(|s| s.to_string()).collect();
        let order: Vec<&str> = perm.iter().map(|&k| labels[k].as_str()).collect();
        let p = t.permute_axes(&order).unwrap();
        let back: Vec<&str> = labels.iter().map(String::as_str).collect();
        prop_assert!(p.permute_axes(&back).unwrap().equals(&t));
        for (idx, x) in t.iter() {
            let at: Vec<(&str, usize)> = labels.iter().map(String::as_str).zip(idx).collect();
            prop_assert_eq!(p.get_labeled(&at).unwrap(), x);
        }
    }

    #[test]
    fn partial_transpose_is_involutive(t in operator(2, 3), which in 0usize..3) {
        let spaces: &[&str] = match which { 0 => &["a"], 1 => &["b"], _ => &["a", "b"] };
        let tt = t.partial_transpose(spaces).unwrap().partial_transpose(spaces).unwrap();
        prop_assert!(tt.equals(&t));
    }

    #[test]
    fn contraction_matches_nested_loops(
        t in tensor_with(vec![2, 3, 2]),
        u in tensor_with(vec![3, 2]),
        t2 in tensor_with(vec![2, 3, 2]),
        k in small_q(),
    ) {
        // t(i,j,l) u(j',p) summed over j = j'.
        let c = t.contract(&u, &[("t1", "t0")]).unwrap();
        for i in 0..2 {
            for l in 0..2 {
                for p in 0..2 {
                    let mut s = q(0);
                    for j in 0..3 {
                        s += t.get(&[i, j, l]) * u.get(&[j, p]);
                    }
                    prop_assert_eq!(c.get(&[i, l, p]), &s);
                }
            }
        }
        let lhs = t.plus(&t2.scale_left(&k)).unwrap().contract(&u, &[("t1", "t0")]).unwrap();
        let rhs = c.plus(&t2.contract(&u, &[("t1", "t0")]).unwrap().scale_left(&k)).unwrap();
        prop_assert!(lhs.equals(&rhs));
    }

    #[test]
    fn inverse_composes_to_identity(t in operator(2, 2)) {
        if let Ok(inv) = t.inverse(&["a", "b"]) {
            let id = QTensor::identity(&[("a", 2, Kind::Color), ("b", 2, Kind::Flavor)]);
            prop_assert!(t.compose(&inv).unwrap().equals(&id));
            prop_assert!(inv.compose(&t).unwrap().equals(&id));
        }
    }

    #[test]
    fn jet_ring_axioms(a in jet(), b in jet(), c in jet()) {
        prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        prop_assert_eq!(a.plus(&b).times(&c), a.times(&c).plus(&b.times(&c)));
        let h = HbarJet::hbar(q(1));
        prop_assert!(h.times(&h).is_zero());
    }
}

#[test]
fn flip_squares_to_identity() {
    let p = QTensor::flip("1", "2", 3, Kind::Color);
    let id = QTensor::identity(&[("1", 3, Kind::Color), ("2", 3, Kind::Color)]);
    assert!(p.compose(&p).unwrap().equals(&id));
}

#[test]
fn mismatched_contraction_names_labels() {
    let t = QTensor::zeros(vec![Axis::new("x", 2, Kind::Color)]).unwrap();
    let u = QTensor::zeros(vec![Axis::new("y", 3, Kind::Color)]).unwrap();
    let e = t.contract(&u, &[("x", "y")]).unwrap_err().to_string();
    assert!(e.contains('x') && e.contains('y'), "{e}");
}

#[test]
fn jet_product_truncates() {
    let a: HbarJet<Q> = HbarJet::new(q(2), q(3));
    let b = HbarJet::new(q(5), q(7));
    assert_eq!(a.times(&b), HbarJet::new(q(10), q(29)));
}
