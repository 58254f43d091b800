#![allow(dead_code)]

use std::path::PathBuf;

use fsc_core::{Complex64, Pauli, PauliSum, PauliWord, StateVector};
use proptest::prelude::*;

pub fn fixture(molecule: &str, name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(molecule)
        .join(name)
}

pub fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

pub fn word(n: usize) -> impl Strategy<Value = PauliWord> {
    prop::collection::vec(pauli(), n).prop_map(|p| PauliWord::from_paulis(&p))
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

pub fn sum(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((complex(), word(n)), 1..=max_terms)
        .prop_map(move |terms| PauliSum::from_terms(n, terms).unwrap())
}

/// `(O + O†)/2` of a random sum.
pub fn hermitian(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    sum(n, max_terms).prop_map(|s| s.add(&s.adjoint()).unwrap().scale(Complex64::new(0.5, 0.0)))
}

pub fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(complex(), 1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::from_amplitudes(v).unwrap())
}

/// Two orthonormal states from Gram–Schmidt on random vectors.
pub fn orthonormal_pair(n: usize) -> impl Strategy<Value = (StateVector, StateVector)> {
    (state(n), state(n)).prop_filter_map("independent", |(a, b)| {
        let overlap = a.inner_product(&b).unwrap();
        if overlap.norm() > 0.99 {
            return None;
        }
        let b = StateVector::superpose(&b, Complex64::new(1.0, 0.0), &a, -overlap).ok()?;
        Some((a, b))
    })
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
