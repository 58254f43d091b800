//! Dense statevector simulation: Pauli rotations, expectation values and
//! inner products.

use num_complex::Complex64;

use crate::pauli::{PauliSum, PauliWord};
use crate::{Error, Result};

/// Largest imaginary part tolerated on an expectation value before it is
/// treated as a bug.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state; qubit 0 is the most significant bit of `index`.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        let dim = 1usize
            .checked_shl(n as u32)
            .filter(|_| n < usize::BITS as usize)
            .ok_or_else(|| Error::Invalid(format!("{n} qubits is too many for a statevector")))?;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, limit: dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amplitudes })
    }

    /// Wraps raw amplitudes, normalizing them.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Invalid(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Invalid("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(StateVector {
            n: dim.trailing_zeros() as usize,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: f64) -> StateVector {
        let p = Complex64::from_polar(1.0, phi);
        StateVector {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|a| a * p).collect(),
        }
    }

    /// Normalized `α·a + β·b`.
    pub fn superpose(a: &StateVector, alpha: Complex64, b: &StateVector, beta: Complex64) -> Result<StateVector> {
        a.check_size(b.n)?;
        StateVector::from_amplitudes(
            a.amplitudes
                .iter()
                .zip(&b.amplitudes)
                .map(|(x, y)| alpha * x + beta * y)
                .collect(),
        )
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: n,
            });
        }
        Ok(())
    }

    /// In place `exp(−i·θ/2·w)|ψ⟩ = cos(θ/2)|ψ⟩ − i·sin(θ/2)·w|ψ⟩`.
    pub fn rotate(&mut self, word: &PauliWord, theta: f64) -> Result<()> {
        self.check_size(word.num_qubits())?;
        let (s, c) = (0.5 * theta).sin_cos();
        let x = word.x_mask() as usize;
        let minus_i_s = Complex64::new(0.0, -s);
        if x == 0 {
            // Diagonal word: each amplitude picks up e^{∓iθ/2}.
            let plus = Complex64::new(c, -s);
            let minus = Complex64::new(c, s);
            let z = word.z_mask() as usize;
            for (b, a) in self.amplitudes.iter_mut().enumerate() {
                *a *= if (b & z).count_ones() % 2 == 0 { plus } else { minus };
            }
            return Ok(());
        }
        for b in 0..self.amplitudes.len() {
            let partner = b ^ x;
            if partner < b {
                continue;
            }
            // (w ψ)[partner] = p(b) ψ[b],  (w ψ)[b] = p(partner) ψ[partner]
            let (pb, _) = word.apply_to_basis(b);
            let (pp, _) = word.apply_to_basis(partner);
            let ab = self.amplitudes[b];
            let ap = self.amplitudes[partner];
            self.amplitudes[b] = ab * c + minus_i_s * pp * ap;
            self.amplitudes[partner] = ap * c + minus_i_s * pb * ab;
        }
        Ok(())
    }

    pub fn apply_pauli_rotation(&self, word: &PauliWord, theta: f64) -> Result<StateVector> {
        let mut out = self.clone();
        out.rotate(word, theta)?;
        Ok(out)
    }

    /// `O|ψ⟩` (unnormalized amplitudes).
    pub fn apply_sum(&self, op: &PauliSum) -> Result<Vec<Complex64>> {
        self.check_size(op.num_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for t in op.terms() {
            for (b, a) in self.amplitudes.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let (phase, target) = t.word.apply_to_basis(b);
                out[target] += t.coefficient * phase * a;
            }
        }
        Ok(out)
    }

    /// `⟨ψ|O|ψ⟩` for a Hermitian `O`.
    pub fn expectation(&self, op: &PauliSum) -> Result<f64> {
        if !op.is_hermitian() {
            return Err(Error::NotHermitian(op.label.clone()));
        }
        let value = self.matrix_element_raw(op, self)?;
        if value.im.abs() > IMAGINARY_RESIDUE_TOLERANCE * (1.0 + op.one_norm()) {
            return Err(Error::NotHermitian(format!(
                "{} (expectation has imaginary part {:e})",
                op.label, value.im
            )));
        }
        Ok(value.re)
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        self.check_size(other.n)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// `⟨self|O|other⟩` for any Pauli sum.
    pub fn matrix_element(&self, op: &PauliSum, other: &StateVector) -> Result<Complex64> {
        self.check_size(other.n)?;
        self.matrix_element_raw(op, other)
    }

    fn matrix_element_raw(&self, op: &PauliSum, other: &StateVector) -> Result<Complex64> {
        let applied = other.apply_sum(op)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}
