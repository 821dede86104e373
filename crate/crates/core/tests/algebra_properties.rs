mod common;

use proptest::prelude::*;
use taut_core::formal_sum::Unknown;
use taut_core::gwi::{format_document, parse_document, parse_sum};
use taut_core::operators::{apply_r, r_graph, transpose_sum};
use taut_core::{rat, FormalSum, Rational, SymbolicSum};

fn coefficient() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

/// A random sum of graphs with legs 1..=5 in some common ambient.
fn sum(terms: usize) -> impl Strategy<Value = FormalSum> {
    proptest::collection::vec((any::<u64>(), coefficient()), 0..=terms).prop_map(|ts| {
        let mut s = FormalSum::new();
        for (seed, c) in ts {
            s.add_term(&common::seeded_graph(seed, 9, 2), c);
        }
        s
    })
}

fn three_point_sum(terms: usize) -> impl Strategy<Value = FormalSum> {
    let pool = [
        "<1 2 3>_1",
        "<1 2 3^1>_1",
        "<1 2 e0>_0 <3 e0>_1",
        "<1 e0>_1 <2 3 e0>_0",
        "<1 2 3 e0 e0>_0",
        "<1^2 2 3>_1",
        "<1 2 3>_1[k1]",
        "<1 2 e0 e1>_0 <3 e0 e1>_0",
        "<1 2 e0>_0 <3 e1 e1 e0>_0",
    ];
    proptest::collection::vec((0..pool.len(), coefficient()), 0..=terms).prop_map(move |ts| {
        let mut s = FormalSum::new();
        for (i, c) in ts {
            s.add_scaled(&parse_sum(pool[i]).unwrap(), &c);
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn vector_space_axioms(a in sum(4), b in sum(4), c in sum(4), x in coefficient(), y in coefficient()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a + &FormalSum::new(), a.clone());
        prop_assert_eq!((&a + &b).scale(&x), &a.scale(&x) + &b.scale(&x));
        prop_assert_eq!(a.scale(&(&x + &y)), &a.scale(&x) + &a.scale(&y));
        prop_assert_eq!(a.scale(&x).scale(&y), a.scale(&(&x * &y)));
        prop_assert_eq!(a.scale(&rat(1, 1)), a.clone());
    }

    #[test]
    fn specialize_is_linear(cols in proptest::collection::vec(sum(3), 1..4), v in proptest::collection::vec(coefficient(), 4), w in proptest::collection::vec(coefficient(), 4), x in coefficient()) {
        let e = SymbolicSum::from_columns(&cols);
        let m = cols.len();
        let at = |vals: &[Rational]| e.specialize_dense(&vals[..m]).unwrap();
        let vw: Vec<Rational> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        prop_assert_eq!(at(&vw), &at(&v) + &at(&w));
        let xv: Vec<Rational> = v.iter().map(|a| a * &x).collect();
        prop_assert_eq!(at(&xv), at(&v).scale(&x));
        let mut direct = FormalSum::new();
        for (col, c) in cols.iter().zip(&v) {
            direct.add_scaled(col, c);
        }
        prop_assert_eq!(at(&v), direct);
    }

    #[test]
    fn gwi_round_trip(a in sum(6)) {
        prop_assert_eq!(parse_document(&format_document(&a)).unwrap(), a.clone());
        prop_assert_eq!(parse_sum(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn symbolic_round_trip(cols in proptest::collection::vec(sum(3), 1..4)) {
        let e = SymbolicSum::from_columns(&cols);
        let back = taut_core::gwi::parse_symbolic(&e.to_string()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn dimension_drop_and_vanishing(seed in any::<u64>(), l in 1u32..6) {
        let g = common::seeded_graph(seed, 8, 2);
        let d = g.dimension();
        let i = g.max_external() + 1;
        let out = r_graph(&g, l, i, i + 1).unwrap();
        for (t, _) in out.iter() {
            prop_assert_eq!(t.dimension(), d - l as i64);
            prop_assert!(t.is_valid());
        }
        if l as i64 > d {
            prop_assert!(out.is_zero());
        }
    }

    #[test]
    fn new_labels_have_parity_of_l(seed in any::<u64>(), l in 1u32..5) {
        let g = common::seeded_graph(seed, 8, 2);
        let i = g.max_external() + 1;
        let out = r_graph(&g, l, i, i + 1).unwrap();
        let sign = if l % 2 == 1 { rat(1, 1) } else { rat(-1, 1) };
        prop_assert_eq!(transpose_sum(&out, i, i + 1), out.scale(&sign));
    }

    #[test]
    fn r_is_linear(a in three_point_sum(4), b in three_point_sum(4), x in coefficient(), y in coefficient(), l in 1u32..4) {
        let combo = &a.scale(&x) + &b.scale(&y);
        let lhs = apply_r(&combo, l).unwrap();
        let rhs = &apply_r(&a, l).unwrap().scale(&x) + &apply_r(&b, l).unwrap().scale(&y);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn unknown_indices_are_one_based_in_text() {
    let e = taut_core::gwi::parse_symbolic("c1*<1 2 3>_0 + 1/2*c3*<1 2 3>_0").unwrap();
    let first: Unknown = 0;
    assert_eq!(e.num_unknowns(), 3);
    assert_eq!(e.iter().next().unwrap().1.coefficient(first), rat(1, 1));
}
