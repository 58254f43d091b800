//! Variational eigensolvers: plain VQE, deflated excited states (VQD) with
//! symmetry penalties, and the subspace-search baseline (SSVQE).

use serde::Serialize;

use crate::ansatz::{AnsatzCircuit, AnsatzSpec};
use crate::fermion::{aufbau_occupation, determinant_index, uccsd_generators_for_occupation, SymmetryOperators};
use crate::optimize::{self, OptimizerConfig, TraceEntry};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;
use crate::{Error, Result};

/// Quadratic penalty `weight·(⟨O⟩ − target)²`.
#[derive(Debug, Clone)]
pub struct Penalty {
    pub operator: PauliSum,
    pub target: f64,
    pub weight: f64,
}

/// Overlap penalty `weight·|⟨state|ψ⟩|²` against a previously found state.
#[derive(Debug, Clone)]
pub struct Deflation {
    pub state: StateVector,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct VqeProblem {
    pub hamiltonian: PauliSum,
    pub deflation: Vec<Deflation>,
    pub penalties: Vec<Penalty>,
    pub reference: StateVector,
    pub circuit: AnsatzCircuit,
}

#[derive(Debug, Clone)]
pub struct VqeResult {
    pub params: Vec<f64>,
    /// `⟨ψ(θ*)|H|ψ(θ*)⟩` in Hartree.
    pub energy: f64,
    /// Full objective at `θ*`, including deflation and penalties.
    pub objective: f64,
    /// `⟨O_k⟩ − target_k` per penalty.
    pub penalty_residuals: Vec<f64>,
    /// `|⟨Φ_i|ψ⟩|²` per deflation state.
    pub overlap_residuals: Vec<f64>,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    pub gradient_norm: f64,
    pub state: StateVector,
}

impl VqeResult {
    /// Convergence trace as CSV (`iteration,objective,gradient_norm`).
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,objective,gradient_norm\n");
        for t in &self.trace {
            out.push_str(&format!(
                "{},{},{}\n",
                t.iteration,
                crate::format::sig17(t.objective),
                crate::format::sig17(t.gradient_norm)
            ));
        }
        out
    }
}

fn check_qubits(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::QubitMismatch { expected, found });
    }
    Ok(())
}

impl VqeProblem {
    pub fn new(hamiltonian: PauliSum, reference: StateVector, circuit: AnsatzCircuit) -> Result<Self> {
        if !hamiltonian.is_hermitian() {
            return Err(Error::NotHermitian(hamiltonian.label.clone()));
        }
        check_qubits(hamiltonian.num_qubits(), reference.num_qubits())?;
        check_qubits(hamiltonian.num_qubits(), circuit.num_qubits())?;
        Ok(VqeProblem {
            hamiltonian,
            deflation: Vec::new(),
            penalties: Vec::new(),
            reference,
            circuit,
        })
    }

    pub fn with_deflation(mut self, state: StateVector, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::Invalid(format!("deflation weight must be positive, got {weight}")));
        }
        check_qubits(self.hamiltonian.num_qubits(), state.num_qubits())?;
        self.deflation.push(Deflation { state, weight });
        Ok(self)
    }

    pub fn with_penalty(mut self, operator: PauliSum, target: f64, weight: f64) -> Result<Self> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::Invalid(format!("penalty weight must be nonnegative, got {weight}")));
        }
        if !operator.is_hermitian() {
            return Err(Error::NotHermitian(operator.label.clone()));
        }
        check_qubits(self.hamiltonian.num_qubits(), operator.num_qubits())?;
        self.penalties.push(Penalty {
            operator: operator.simplify(),
            target,
            weight,
        });
        Ok(self)
    }

    pub fn state(&self, params: &[f64]) -> Result<StateVector> {
        self.circuit.prepare_with(params, &self.reference)
    }

    /// `E(θ) + Σ β_i |⟨Φ_i|ψ⟩|² + Σ w_k (⟨O_k⟩ − t_k)²`.
    pub fn objective(&self, params: &[f64]) -> Result<f64> {
        let psi = self.state(params)?;
        Ok(self.objective_of_state(&psi))
    }

    fn objective_of_state(&self, psi: &StateVector) -> f64 {
        let mut value = real_expectation(psi, &self.hamiltonian);
        for d in &self.deflation {
            value += d.weight * overlap_sqr(&d.state, psi);
        }
        for p in &self.penalties {
            let dev = real_expectation(psi, &p.operator) - p.target;
            value += p.weight * dev * dev;
        }
        value
    }

    pub fn minimize(&self, config: &OptimizerConfig) -> Result<VqeResult> {
        config.validate()?;
        let f = |theta: &[f64]| {
            let mut psi = self.reference.clone();
            match self.circuit.apply_with(theta, &mut psi) {
                Ok(()) => self.objective_of_state(&psi),
                Err(_) => f64::NAN,
            }
        };
        let best = optimize::minimize(&f, self.circuit.num_params(), config);
        self.result_from(best.params, best.trace, best.converged, best.gradient_norm)
    }

    fn result_from(
        &self,
        params: Vec<f64>,
        trace: Vec<TraceEntry>,
        converged: bool,
        gradient_norm: f64,
    ) -> Result<VqeResult> {
        let state = self.state(&params)?;
        let energy = state.expectation(&self.hamiltonian)?;
        let penalty_residuals = self
            .penalties
            .iter()
            .map(|p| state.expectation(&p.operator).map(|v| v - p.target))
            .collect::<Result<Vec<_>>>()?;
        let overlap_residuals = self
            .deflation
            .iter()
            .map(|d| d.state.fidelity(&state))
            .collect::<Result<Vec<_>>>()?;
        Ok(VqeResult {
            objective: self.objective_of_state(&state),
            params,
            energy,
            penalty_residuals,
            overlap_residuals,
            trace,
            converged,
            gradient_norm,
            state,
        })
    }
}

/// Real part of `⟨ψ|O|ψ⟩` without the Hermiticity re-check; callers
/// validate operators once up front.
fn real_expectation(psi: &StateVector, op: &PauliSum) -> f64 {
    psi.matrix_element(op, psi).map(|v| v.re).unwrap_or(f64::NAN)
}

fn overlap_sqr(a: &StateVector, b: &StateVector) -> f64 {
    a.fidelity(b).unwrap_or(f64::NAN)
}

/// Particle-number and spin sector a state is steered into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorTarget {
    pub electrons: usize,
    pub sz: f64,
    pub s2: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumSettings {
    pub uccsd_depth: usize,
    pub ham_depth: usize,
    /// Weight of each symmetry penalty, Hartree per unit squared deviation.
    pub penalty_weight: f64,
    /// Overlap penalty weight; defaults to twice the Hamiltonian 1-norm.
    pub deflation_weight: Option<f64>,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        SpectrumSettings {
            uccsd_depth: 2,
            ham_depth: 2,
            penalty_weight: 1.0,
            deflation_weight: None,
        }
    }
}

/// Deflation weight guaranteed to exceed any spectral gap of `h`.
pub fn default_deflation_weight(h: &PauliSum) -> f64 {
    2.0 * h.one_norm()
}

/// Reference determinant and ansatz circuit for one sector target.
pub fn sector_ansatz(
    hamiltonian: &PauliSum,
    target: &SectorTarget,
    uccsd_depth: usize,
    ham_depth: usize,
) -> Result<(StateVector, AnsatzCircuit)> {
    let n = hamiltonian.num_qubits();
    let occ = aufbau_occupation(n, target.electrons, target.sz)?;
    let reference = StateVector::basis_state(n, determinant_index(n, &occ)?)?;
    let generators = uccsd_generators_for_occupation(n, &occ)?;
    let circuit = AnsatzSpec::new(uccsd_depth, ham_depth, generators, hamiltonian).build()?;
    Ok((reference, circuit))
}

fn derived_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Finds `targets.len()` states one after another, each deflated against
/// all earlier ones and penalized toward its sector. Results come back in
/// solve order, which is ascending in energy up to degeneracies.
pub fn solve_spectrum(
    hamiltonian: &PauliSum,
    symmetry: &SymmetryOperators,
    targets: &[SectorTarget],
    settings: &SpectrumSettings,
    config: &OptimizerConfig,
) -> Result<Vec<VqeResult>> {
    let dim = 1usize << hamiltonian.num_qubits();
    if targets.is_empty() || targets.len() > dim {
        return Err(Error::Invalid(format!(
            "state count {} must be between 1 and {dim}",
            targets.len()
        )));
    }
    let beta = settings
        .deflation_weight
        .unwrap_or_else(|| default_deflation_weight(hamiltonian));
    let mut results: Vec<VqeResult> = Vec::with_capacity(targets.len());
    for (j, target) in targets.iter().enumerate() {
        let (reference, circuit) =
            sector_ansatz(hamiltonian, target, settings.uccsd_depth, settings.ham_depth)?;
        let mut problem = VqeProblem::new(hamiltonian.clone(), reference, circuit)?
            .with_penalty(symmetry.number.clone(), target.electrons as f64, settings.penalty_weight)?
            .with_penalty(symmetry.sz.clone(), target.sz, settings.penalty_weight)?
            .with_penalty(symmetry.s2.clone(), target.s2, settings.penalty_weight)?;
        for prev in &results {
            problem = problem.with_deflation(prev.state.clone(), beta)?;
        }
        let state_config = OptimizerConfig {
            seed: derived_seed(config.seed, j),
            ..config.clone()
        };
        results.push(problem.minimize(&state_config)?);
    }
    Ok(results)
}

/// SSVQE weights `m, m−1, …, 1` normalized to sum to one.
pub fn default_ssvqe_weights(m: usize) -> Vec<f64> {
    let total = (m * (m + 1) / 2) as f64;
    (0..m).map(|k| (m - k) as f64 / total).collect()
}

/// Orthogonal SSVQE inputs: determinants in the targets' sectors ordered by
/// diagonal energy (ties by index).
pub fn ssvqe_references(hamiltonian: &PauliSum, symmetry: &SymmetryOperators, targets: &[SectorTarget]) -> Result<Vec<StateVector>> {
    let n = hamiltonian.num_qubits();
    let mut candidates = Vec::new();
    for index in 0..1usize << n {
        let b = StateVector::basis_state(n, index)?;
        let electrons = real_expectation(&b, &symmetry.number);
        let sz = real_expectation(&b, &symmetry.sz);
        let in_sector = targets
            .iter()
            .any(|t| (electrons - t.electrons as f64).abs() < 1e-9 && (sz - t.sz).abs() < 1e-9);
        if in_sector {
            candidates.push((real_expectation(&b, hamiltonian), index, b));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if candidates.len() < targets.len() {
        return Err(Error::Invalid(format!(
            "only {} determinants available for {} SSVQE states",
            candidates.len(),
            targets.len()
        )));
    }
    Ok(candidates.into_iter().take(targets.len()).map(|c| c.2).collect())
}

/// One shared circuit minimizing `Σ_k w_k ⟨ref_k|U†HU|ref_k⟩`.
pub fn ssvqe(
    hamiltonian: &PauliSum,
    references: &[StateVector],
    weights: &[f64],
    circuit: &AnsatzCircuit,
    config: &OptimizerConfig,
) -> Result<Vec<VqeResult>> {
    config.validate()?;
    if !hamiltonian.is_hermitian() {
        return Err(Error::NotHermitian(hamiltonian.label.clone()));
    }
    if references.is_empty() || references.len() != weights.len() {
        return Err(Error::Invalid(format!(
            "{} references but {} weights",
            references.len(),
            weights.len()
        )));
    }
    if weights.windows(2).any(|w| !(w[0] > w[1])) || weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Invalid("SSVQE weights must be positive and strictly decreasing".into()));
    }
    for (a, ra) in references.iter().enumerate() {
        check_qubits(hamiltonian.num_qubits(), ra.num_qubits())?;
        for rb in &references[a + 1..] {
            if ra.fidelity(rb)? > 1e-12 {
                return Err(Error::Invalid("SSVQE references must be orthogonal".into()));
            }
        }
    }
    let f = |theta: &[f64]| {
        references
            .iter()
            .zip(weights)
            .map(|(r, w)| {
                let mut psi = r.clone();
                match circuit.apply_with(theta, &mut psi) {
                    Ok(()) => w * real_expectation(&psi, hamiltonian),
                    Err(_) => f64::NAN,
                }
            })
            .sum::<f64>()
    };
    let best = optimize::minimize(&f, circuit.num_params(), config);
    let objective = best.value;
    references
        .iter()
        .map(|r| {
            let state = circuit.prepare_with(&best.params, r)?;
            Ok(VqeResult {
                params: best.params.clone(),
                energy: state.expectation(hamiltonian)?,
                objective,
                penalty_residuals: Vec::new(),
                overlap_residuals: Vec::new(),
                trace: best.trace.clone(),
                converged: best.converged,
                gradient_norm: best.gradient_norm,
                state,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{symmetry_operators, uccsd_generators};
    use crate::pauli::PauliWord;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn one_qubit_problem() -> VqeProblem {
        let h = PauliSum::from_real(&[(1.0, "Z")]).unwrap();
        let circuit = AnsatzCircuit::new(1, vec![("X".parse::<PauliWord>().unwrap(), 0)], vec![0.0]).unwrap();
        VqeProblem::new(h, StateVector::basis_state(1, 0).unwrap(), circuit).unwrap()
    }

    #[test]
    fn one_qubit_rotation_reaches_minus_one() {
        let r = one_qubit_problem().minimize(&OptimizerConfig::default()).unwrap();
        assert!((r.energy + 1.0).abs() < 1e-10, "{}", r.energy);
        let theta = r.params[0].rem_euclid(2.0 * PI);
        assert!((theta - PI).abs() < 1e-4, "{theta}");
        assert!(r.converged);
    }

    #[test]
    fn objective_reduces_to_energy() {
        let p = one_qubit_problem();
        for theta in [0.0, 0.4, 2.0] {
            assert!((p.objective(&[theta]).unwrap() - theta.cos()).abs() < 1e-14);
        }
        assert!(matches!(
            p.objective(&[0.1, 0.2]),
            Err(Error::ParameterMismatch { .. })
        ));
    }

    #[test]
    fn orthogonal_deflation_costs_nothing() {
        let p = one_qubit_problem()
            .with_deflation(StateVector::basis_state(1, 1).unwrap(), 5.0)
            .unwrap();
        assert!((p.objective(&[0.0]).unwrap() - 1.0).abs() < 1e-15);
        // Deflating |0> pushes the minimum to |1> even with a tiny gap.
        let p = one_qubit_problem()
            .with_deflation(StateVector::basis_state(1, 0).unwrap(), 5.0)
            .unwrap();
        assert!((p.objective(&[0.0]).unwrap() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_weights_are_rejected() {
        assert!(one_qubit_problem()
            .with_deflation(StateVector::basis_state(1, 1).unwrap(), 0.0)
            .is_err());
        assert!(one_qubit_problem()
            .with_penalty(PauliSum::from_real(&[(1.0, "Z")]).unwrap(), 0.0, -1.0)
            .is_err());
    }

    #[test]
    fn objective_matches_dense_evaluation() {
        let h = PauliSum::from_real(&[
            (-0.4, "IIII"),
            (0.17, "ZIII"),
            (-0.22, "IIZI"),
            (0.12, "ZZII"),
            (0.045, "XXYY"),
            (-0.045, "YYXX"),
        ])
        .unwrap();
        let sym = symmetry_operators(4).unwrap();
        let circuit = AnsatzSpec::new(1, 1, uccsd_generators(4, 2).unwrap(), &h).build().unwrap();
        let prev = StateVector::basis_state(4, 0b0011).unwrap();
        let p = VqeProblem::new(h.clone(), StateVector::basis_state(4, 12).unwrap(), circuit)
            .unwrap()
            .with_deflation(prev.clone(), 3.0)
            .unwrap()
            .with_penalty(sym.s2.clone(), 0.0, 0.7)
            .unwrap();
        let theta: Vec<f64> = (0..p.circuit.num_params()).map(|i| (i as f64 * 0.91).cos()).collect();
        let psi = p.state(&theta).unwrap();

        let v = psi.amplitudes();
        let dense_expect = |m: &crate::linalg::CMatrix| -> f64 {
            let mv = m.matvec(v);
            v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
        };
        let e = dense_expect(&h.dense_matrix().unwrap());
        let s2 = dense_expect(&sym.s2.dense_matrix().unwrap());
        let ov: Complex64 = prev.amplitudes().iter().zip(v).map(|(a, b)| a.conj() * b).sum();
        let expected = e + 3.0 * ov.norm_sqr() + 0.7 * s2 * s2;
        assert!((p.objective(&theta).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn ssvqe_single_state_is_plain_vqe() {
        let p = one_qubit_problem();
        let r = ssvqe(
            &p.hamiltonian,
            &[p.reference.clone()],
            &[1.0],
            &p.circuit,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!((r[0].energy + 1.0).abs() < 1e-10);
    }

    #[test]
    fn ssvqe_validates_inputs() {
        let p = one_qubit_problem();
        let refs = [StateVector::basis_state(1, 0).unwrap(), StateVector::basis_state(1, 1).unwrap()];
        let cfg = OptimizerConfig::default();
        assert!(ssvqe(&p.hamiltonian, &refs, &[0.5, 0.5], &p.circuit, &cfg).is_err());
        assert!(ssvqe(&p.hamiltonian, &refs, &[1.0], &p.circuit, &cfg).is_err());
        let same = [refs[0].clone(), refs[0].clone()];
        assert!(ssvqe(&p.hamiltonian, &same, &[2.0, 1.0], &p.circuit, &cfg).is_err());
    }

    #[test]
    fn ssvqe_weights_decrease() {
        let w = default_ssvqe_weights(4);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(w.windows(2).all(|p| p[0] > p[1]));
    }
}
