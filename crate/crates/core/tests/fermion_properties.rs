mod common;

use common::fixture;
use fsc_core::fermion::{ladder_operator, symmetry_operators, uccsd_generators};
use fsc_core::{Complex64, PauliSum};

fn anticommutator(a: &PauliSum, b: &PauliSum) -> PauliSum {
    a.multiply(b).unwrap().add(&b.multiply(a).unwrap()).unwrap()
}

fn max_coefficient(s: &PauliSum) -> f64 {
    s.simplify().terms().iter().map(|t| t.coefficient.norm()).fold(0.0, f64::max)
}

#[test]
fn canonical_anticommutation_up_to_six_spin_orbitals() {
    for n in 1..=6 {
        for p in 0..n {
            let ap = ladder_operator(p, false, n).unwrap();
            let ap_dag = ladder_operator(p, true, n).unwrap();
            for q in 0..n {
                let aq = ladder_operator(q, false, n).unwrap();
                let aq_dag = ladder_operator(q, true, n).unwrap();
                assert!(max_coefficient(&anticommutator(&ap, &aq)) <= 1e-12, "{{a{p}, a{q}}} n={n}");
                assert!(max_coefficient(&anticommutator(&ap_dag, &aq_dag)) <= 1e-12);
                let mixed = anticommutator(&ap, &aq_dag);
                let expected = if p == q { PauliSum::identity(n) } else { PauliSum::zero(n) };
                assert!(max_coefficient(&mixed.sub(&expected).unwrap()) <= 1e-12, "{{a{p}, a{q}†}} n={n}");
            }
        }
    }
}

#[test]
fn generators_are_anti_hermitian_and_conserve_symmetries() {
    for (n, ne) in [(4, 2), (4, 3), (6, 2), (6, 3)] {
        let sym = symmetry_operators(n).unwrap();
        let set = uccsd_generators(n, ne).unwrap();
        assert!(!set.is_empty());
        for g in &set.generators {
            assert!(g.is_anti_hermitian());
            for op in [&sym.number, &sym.sz] {
                assert!(max_coefficient(&g.commutator(op).unwrap()) <= 1e-12);
            }
        }
    }
}

fn load(molecule: &str, name: &str) -> PauliSum {
    PauliSum::read(fixture(molecule, name)).unwrap()
}

#[test]
fn fixture_hamiltonians_conserve_number_and_spin() {
    for molecule in ["h2", "heh", "heh_cation"] {
        let h = load(molecule, "hamiltonian.txt");
        assert!(h.is_hermitian());
        for op in ["number.txt", "sz.txt", "s2.txt"] {
            let c = h.commutator(&load(molecule, op)).unwrap();
            assert!(max_coefficient(&c) <= 1e-10, "{molecule} [H, {op}]");
        }
        for d in ["dipole_x.txt", "dipole_y.txt", "dipole_z.txt"] {
            let dip = load(molecule, d);
            assert!(dip.is_hermitian());
            let c = dip.commutator(&load(molecule, "number.txt")).unwrap();
            assert!(max_coefficient(&c) <= 1e-10, "{molecule} [{d}, N]");
        }
    }
}

#[test]
fn fixture_symmetry_operators_match_the_built_in_ones() {
    let sym = symmetry_operators(4).unwrap();
    for molecule in ["h2", "heh"] {
        for (name, op) in [("number.txt", &sym.number), ("sz.txt", &sym.sz), ("s2.txt", &sym.s2)] {
            let diff = load(molecule, name).sub(op).unwrap();
            assert!(max_coefficient(&diff) <= 1e-12, "{molecule} {name}");
        }
    }
}

#[test]
fn spin_algebra() {
    // S² = Sz² + Sz + S₋S₊ has eigenvalues s(s+1); on a single electron it is 3/4.
    let sym = symmetry_operators(4).unwrap();
    let m = sym.s2.dense_matrix().unwrap();
    let n = sym.number.dense_matrix().unwrap();
    // |1000⟩: one α electron in orbital 0.
    let idx = 0b1000;
    assert!((m[(idx, idx)] - Complex64::new(0.75, 0.0)).norm() < 1e-12);
    assert!((n[(idx, idx)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
}
