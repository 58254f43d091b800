//! Trotterized UCCSD layers followed by Hamiltonian-word propagator layers.
//!
//! Every Pauli word gets its own parameter. Rotations use the
//! `exp(−i·θ/2·w)` convention of [`StateVector::rotate`].

use crate::fermion::GeneratorSet;
use crate::pauli::{PauliSum, PauliWord};
use crate::statevector::StateVector;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct AnsatzSpec {
    pub uccsd_depth: usize,
    pub ham_depth: usize,
    pub generators: GeneratorSet,
    /// Non-identity Hamiltonian words in canonical order.
    pub ham_words: Vec<PauliWord>,
}

impl AnsatzSpec {
    pub fn new(
        uccsd_depth: usize,
        ham_depth: usize,
        generators: GeneratorSet,
        hamiltonian: &PauliSum,
    ) -> Self {
        AnsatzSpec {
            uccsd_depth,
            ham_depth,
            generators,
            ham_words: hamiltonian.non_identity_words(),
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.uccsd_depth * self.generators.word_count() + self.ham_depth * self.ham_words.len()
    }

    pub fn build(&self) -> Result<AnsatzCircuit> {
        if self.uccsd_depth > 0 && self.generators.is_empty() {
            return Err(Error::Invalid(
                "UCCSD depth is nonzero but the generator set is empty".into(),
            ));
        }
        if self.ham_depth > 0 && self.ham_words.is_empty() {
            return Err(Error::Invalid(
                "Hamiltonian depth is nonzero but there are no Hamiltonian words".into(),
            ));
        }
        let n = self.generators.n_spin_orbitals;
        if let Some(w) = self.ham_words.iter().find(|w| w.num_qubits() != n) {
            return Err(Error::QubitMismatch {
                expected: n,
                found: w.num_qubits(),
            });
        }
        let mut words = Vec::with_capacity(self.parameter_count());
        for _ in 0..self.uccsd_depth {
            for g in &self.generators.generators {
                words.extend(g.terms().iter().map(|t| t.word));
            }
        }
        for _ in 0..self.ham_depth {
            words.extend(self.ham_words.iter().copied());
        }
        let rotations = words.into_iter().enumerate().map(|(i, w)| (w, i)).collect::<Vec<_>>();
        let params = vec![0.0; rotations.len()];
        Ok(AnsatzCircuit {
            n_qubits: n,
            rotations,
            params,
        })
    }
}

/// Ordered Pauli rotations with a parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit {
    n_qubits: usize,
    rotations: Vec<(PauliWord, usize)>,
    params: Vec<f64>,
}

impl AnsatzCircuit {
    pub fn new(n_qubits: usize, rotations: Vec<(PauliWord, usize)>, params: Vec<f64>) -> Result<Self> {
        if let Some(&(_, idx)) = rotations.iter().find(|(_, idx)| *idx >= params.len()) {
            return Err(Error::IndexOutOfRange {
                index: idx,
                limit: params.len(),
            });
        }
        if let Some((w, _)) = rotations.iter().find(|(w, _)| w.num_qubits() != n_qubits) {
            return Err(Error::QubitMismatch {
                expected: n_qubits,
                found: w.num_qubits(),
            });
        }
        Ok(AnsatzCircuit {
            n_qubits,
            rotations,
            params,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn rotations(&self) -> &[(PauliWord, usize)] {
        &self.rotations
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        self.check_params(params)?;
        self.params.copy_from_slice(params);
        Ok(())
    }

    pub fn with_params(&self, params: &[f64]) -> Result<AnsatzCircuit> {
        let mut out = self.clone();
        out.set_params(params)?;
        Ok(out)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::ParameterMismatch {
                expected: self.params.len(),
                found: params.len(),
            });
        }
        Ok(())
    }

    /// Applies the rotations with `params` to `state` in place.
    pub fn apply_with(&self, params: &[f64], state: &mut StateVector) -> Result<()> {
        self.check_params(params)?;
        if state.num_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                found: state.num_qubits(),
            });
        }
        for (word, idx) in &self.rotations {
            state.rotate(word, params[*idx])?;
        }
        Ok(())
    }

    /// `U(θ)^times |state⟩` with the given parameters.
    pub fn apply_power(&self, params: &[f64], state: &StateVector, times: usize) -> Result<StateVector> {
        let mut out = state.clone();
        for _ in 0..times {
            self.apply_with(params, &mut out)?;
        }
        Ok(out)
    }

    /// `U(θ)|reference⟩` with the stored parameters.
    pub fn prepare(&self, reference: &StateVector) -> Result<StateVector> {
        self.prepare_with(&self.params, reference)
    }

    pub fn prepare_with(&self, params: &[f64], reference: &StateVector) -> Result<StateVector> {
        self.apply_power(params, reference, 1)
    }
}
