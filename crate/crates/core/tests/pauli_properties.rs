mod common;

use common::{complex, sum, word};
use fsc_core::linalg::CMatrix;
use fsc_core::PauliSum;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn word_product_is_a_homomorphism(a in word(3), b in word(3)) {
        let (phase, w) = a.multiply(&b).unwrap();
        let lhs = w.dense_matrix().scale(phase);
        let rhs = a.dense_matrix().matmul(&b.dense_matrix());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn word_product_is_associative(a in word(4), b in word(4), c in word(4)) {
        let (p1, ab) = a.multiply(&b).unwrap();
        let (p2, ab_c) = ab.multiply(&c).unwrap();
        let (q1, bc) = b.multiply(&c).unwrap();
        let (q2, a_bc) = a.multiply(&bc).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert!((p1 * p2 - q1 * q2).norm() <= 1e-12);
    }

    #[test]
    fn commutation_matches_dense_commutator(a in word(3), b in word(3)) {
        let (ma, mb) = (a.dense_matrix(), b.dense_matrix());
        let comm = ma.matmul(&mb).sub(&mb.matmul(&ma));
        prop_assert_eq!(a.commutes_with(&b), comm.max_abs() <= 1e-12);
    }

    #[test]
    fn sum_product_is_a_homomorphism(a in sum(3, 6), b in sum(3, 6)) {
        let lhs = a.multiply(&b).unwrap().dense_matrix().unwrap();
        let rhs = a.dense_matrix().unwrap().matmul(&b.dense_matrix().unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
    }

    #[test]
    fn sum_addition_and_scaling_are_linear(a in sum(3, 5), b in sum(3, 5), c in complex()) {
        let lhs = a.add(&b.scale(c)).unwrap().dense_matrix().unwrap();
        let rhs = a.dense_matrix().unwrap().add(&b.dense_matrix().unwrap().scale(c));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn simplify_is_idempotent(a in sum(4, 12)) {
        let once = a.simplify();
        prop_assert_eq!(once.simplify(), once.clone());
        // Canonical order, no duplicates.
        let words: Vec<_> = once.terms().iter().map(|t| t.word).collect();
        prop_assert!(words.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adjoint_matches_dense(a in sum(3, 6)) {
        let lhs = a.adjoint().dense_matrix().unwrap();
        prop_assert!(lhs.max_abs_diff(&a.dense_matrix().unwrap().adjoint()) <= 1e-12);
    }

    #[test]
    fn text_round_trip_is_exact(a in sum(4, 10)) {
        let a = a.simplify();
        let back = PauliSum::parse_text(&a.to_text()).unwrap();
        prop_assert_eq!(back.terms(), a.terms());
    }
}

#[test]
fn identity_is_neutral() {
    let i = PauliSum::identity(2).dense_matrix().unwrap();
    assert!(i.max_abs_diff(&CMatrix::identity(4)) == 0.0);
    let x = PauliSum::from_real(&[(0.5, "XY"), (-1.0, "ZI")]).unwrap();
    assert_eq!(x.multiply(&PauliSum::identity(2)).unwrap(), x.simplify());
    assert!(x.sub(&x).unwrap().is_empty());
}
