//! Frame superposition clusters.
//!
//! An FSC operator `U_{j→k}` is an ansatz circuit trained so that
//! `U^n|Φ_j⟩ = |Φ_k⟩`. Applying it `n/2` times gives `|+⟩`, an equal
//! superposition of the two states. A second operator `U_{+→−}`, trained to
//! carry `|+⟩` into the orthogonal superposition `|−⟩`, gives `|y+⟩` after
//! `n/2` applications: the superposition with a relative phase of π/2.
//! With both in hand, any Hermitian observable's off-diagonal element
//! follows from three diagonal expectations:
//!
//! ```text
//! a = ⟨+|O|+⟩  − ½(O_jj + O_kk)
//! b = ⟨y+|O|y+⟩ − ½(O_jj + O_kk)
//! |O_jk| = √(a² + b²)
//! ```

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::AnsatzCircuit;
use crate::optimize::{self, OptimizerConfig};
use crate::oracle::DEGENERACY_TOLERANCE;
use crate::pauli::PauliSum;
use crate::report::convert_units;
use crate::statevector::StateVector;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct FscSettings {
    pub uccsd_depth: usize,
    /// Hamiltonian-word layers appended to the FSC body. At least one is
    /// needed for `U_{+→−}` to build complex relative phases.
    pub ham_depth: usize,
    /// Number of applications that complete the transfer; must be even.
    pub n: usize,
    pub fidelity_threshold: f64,
    /// Hartree.
    pub h_const_threshold: f64,
    /// Allowed deviation of superposition populations from ½.
    pub balance_tolerance: f64,
    /// Spread of random starting parameters for FSC training.
    pub init_scale: f64,
}

impl Default for FscSettings {
    fn default() -> Self {
        FscSettings {
            uccsd_depth: 4,
            ham_depth: 1,
            n: 2,
            fidelity_threshold: 0.999,
            h_const_threshold: 1e-4,
            balance_tolerance: 1e-3,
            init_scale: 1.0,
        }
    }
}

impl FscSettings {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Invalid(format!("FSC power n must be even and at least 2, got {n}")));
    }
    Ok(())
}

/// A trained FSC: `circuit^n` carries the source state into the target.
#[derive(Debug, Clone)]
pub struct FscOperator {
    pub circuit: AnsatzCircuit,
    pub n: usize,
    pub source: usize,
    pub target: usize,
    /// `|⟨target|U^n|source⟩|²`.
    pub fidelity: f64,
    /// Largest deviation of the half-transfer populations from ½.
    pub balance_error: f64,
    /// Training loss at the returned parameters.
    pub loss: f64,
    pub converged: bool,
}

impl FscOperator {
    pub fn new(circuit: AnsatzCircuit, n: usize, source: usize, target: usize) -> Result<Self> {
        check_n(n)?;
        Ok(FscOperator {
            circuit,
            n,
            source,
            target,
            fidelity: f64::NAN,
            balance_error: f64::NAN,
            loss: f64::NAN,
            converged: false,
        })
    }

    /// `U^{n/2}|state⟩`.
    pub fn half(&self, state: &StateVector) -> Result<StateVector> {
        self.circuit.apply_power(self.circuit.params(), state, self.n / 2)
    }

    /// `U^n|state⟩`.
    pub fn full(&self, state: &StateVector) -> Result<StateVector> {
        self.circuit.apply_power(self.circuit.params(), state, self.n)
    }
}

fn pair_states<'a>(states: &'a [StateVector], j: usize, k: usize) -> Result<(&'a StateVector, &'a StateVector)> {
    let limit = states.len();
    for index in [j, k] {
        if index >= limit {
            return Err(Error::IndexOutOfRange { index, limit });
        }
    }
    Ok((&states[j], &states[k]))
}

/// `|⟨Φ_k|H|Φ_k⟩ − ⟨Φ_j|U^{n†} H U^n|Φ_j⟩|`.
pub fn h_const(op: &FscOperator, states: &[StateVector], hamiltonian: &PauliSum) -> Result<f64> {
    let (phi_j, phi_k) = pair_states(states, op.source, op.target)?;
    let moved = op.full(phi_j)?;
    Ok((phi_k.expectation(hamiltonian)? - moved.expectation(hamiltonian)?).abs())
}

/// `(αΦ_j + iβΦ_k)/‖·‖` with `α, β` the projections of `plus`; equals the
/// exact `|y+⟩` whenever `plus` is an equal superposition.
pub fn provisional_yplus(plus: &StateVector, phi_j: &StateVector, phi_k: &StateVector) -> Result<StateVector> {
    let alpha = phi_j.inner_product(plus)?;
    let beta = phi_k.inner_product(plus)?;
    if alpha.norm_sqr() + beta.norm_sqr() < 1e-24 {
        return Ok(plus.clone());
    }
    StateVector::superpose(phi_j, alpha, phi_k, Complex64::new(0.0, 1.0) * beta)
}

/// Evaluation function `F = a(H) + b(H) + H_const`, with `|+⟩ = U^{n/2}|Φ_j⟩`
/// and the provisional `|y+⟩` of [`provisional_yplus`].
pub fn fsc_transfer_objective(op: &FscOperator, states: &[StateVector], hamiltonian: &PauliSum) -> Result<f64> {
    check_n(op.n)?;
    let (phi_j, phi_k) = pair_states(states, op.source, op.target)?;
    let plus = op.half(phi_j)?;
    let yplus = provisional_yplus(&plus, phi_j, phi_k)?;
    let pair = SuperpositionPair {
        plus,
        yplus,
        j: op.source,
        k: op.target,
        converged: true,
    };
    let e_jj = phi_j.expectation(hamiltonian)?;
    let e_kk = phi_k.expectation(hamiltonian)?;
    let r = extract_offdiagonal(&pair, hamiltonian, e_jj, e_kk)?;
    Ok(r.a + r.b + h_const(op, states, hamiltonian)?)
}

fn population_loss(p: f64) -> f64 {
    (p - 0.5) * (p - 0.5)
}

/// Trains `U_{j→k}`.
///
/// The loss drives `U^n|Φ_j⟩` onto `|Φ_k⟩`, the half-transfer populations of
/// `Φ_j` and `Φ_k` to ½ each with no weight outside their span, and the energy mismatch behind `H_const` to
/// zero. The result is flagged converged when fidelity, `H_const` and
/// population balance all meet the thresholds in `settings`.
pub fn optimize_fsc(
    j: usize,
    k: usize,
    states: &[StateVector],
    hamiltonian: &PauliSum,
    template: &AnsatzCircuit,
    settings: &FscSettings,
    config: &OptimizerConfig,
) -> Result<FscOperator> {
    settings.validate()?;
    let (phi_j, phi_k) = pair_states(states, j, k)?;
    let mut op = FscOperator::new(template.clone(), settings.n, j, k)?;
    if j == k {
        op.circuit.set_params(&vec![0.0; template.num_params()])?;
        op.fidelity = 1.0;
        op.balance_error = 0.0;
        op.loss = 0.0;
        op.converged = true;
        return Ok(op);
    }
    let e_k = phi_k.expectation(hamiltonian)?;
    let half = settings.n / 2;
    let loss = |theta: &[f64]| -> f64 {
        let eval = || -> Result<f64> {
            let plus = template.apply_power(theta, phi_j, half)?;
            let moved = template.apply_power(theta, &plus, half)?;
            let fid = phi_k.fidelity(&moved)?;
            let pj = phi_j.fidelity(&plus)?;
            let pk = phi_k.fidelity(&plus)?;
            let mismatch = e_k - moved.matrix_element(hamiltonian, &moved)?.re;
            let leak = 1.0 - pj - pk;
            Ok((1.0 - fid) + leak + population_loss(pj) + population_loss(pk) + mismatch * mismatch)
        };
        eval().unwrap_or(f64::NAN)
    };
    let fsc_config = OptimizerConfig {
        init_scale: settings.init_scale,
        ..config.clone()
    };
    let best = optimize::minimize(&loss, template.num_params(), &fsc_config);
    op.circuit.set_params(&best.params)?;
    op.loss = best.value;
    let plus = op.half(phi_j)?;
    op.fidelity = phi_k.fidelity(&op.full(phi_j)?)?;
    op.balance_error = (phi_j.fidelity(&plus)? - 0.5)
        .abs()
        .max((phi_k.fidelity(&plus)? - 0.5).abs());
    let hc = h_const(&op, states, hamiltonian)?;
    op.converged = op.fidelity >= settings.fidelity_threshold
        && hc <= settings.h_const_threshold
        && op.balance_error <= settings.balance_tolerance;
    Ok(op)
}

/// The superposition orthogonal to `plus` within span{Φ_j, Φ_k}.
pub fn minus_state(plus: &StateVector, phi_j: &StateVector, phi_k: &StateVector) -> Result<StateVector> {
    // Orthonormal frame e1 = Φ_j, e2 ∝ Φ_k − ⟨Φ_j|Φ_k⟩Φ_j.
    let overlap = phi_j.inner_product(phi_k)?;
    let e2 = StateVector::superpose(phi_k, Complex64::new(1.0, 0.0), phi_j, -overlap)?;
    let alpha = phi_j.inner_product(plus)?;
    let beta = e2.inner_product(plus)?;
    StateVector::superpose(phi_j, -beta.conj(), &e2, alpha.conj())
}

/// Trains `U_{+→−}` so that its half-application turns `|+⟩` into `|y+⟩`.
///
/// The loss combines the `|+⟩ → |−⟩` transfer fidelity with populations of
/// ½ on `Φ_j`, `Φ_k` and `|+⟩` at the half-way point, plus leakage out of
/// span{Φ_j, Φ_k}; the last one pins the
/// relative phase to ±π/2.
pub fn optimize_phase_fsc(
    j: usize,
    k: usize,
    plus: &StateVector,
    states: &[StateVector],
    template: &AnsatzCircuit,
    settings: &FscSettings,
    config: &OptimizerConfig,
) -> Result<FscOperator> {
    settings.validate()?;
    let (phi_j, phi_k) = pair_states(states, j, k)?;
    let mut op = FscOperator::new(template.clone(), settings.n, j, k)?;
    let minus = minus_state(plus, phi_j, phi_k)?;
    let half = settings.n / 2;
    let loss = |theta: &[f64]| -> f64 {
        let eval = || -> Result<f64> {
            let y = template.apply_power(theta, plus, half)?;
            let moved = template.apply_power(theta, &y, half)?;
            let (qj, qk) = (phi_j.fidelity(&y)?, phi_k.fidelity(&y)?);
            Ok((1.0 - minus.fidelity(&moved)?)
                + (1.0 - qj - qk)
                + population_loss(qj)
                + population_loss(qk)
                + population_loss(plus.fidelity(&y)?))
        };
        eval().unwrap_or(f64::NAN)
    };
    let fsc_config = OptimizerConfig {
        init_scale: settings.init_scale,
        ..config.clone()
    };
    let best = optimize::minimize(&loss, template.num_params(), &fsc_config);
    op.circuit.set_params(&best.params)?;
    op.loss = best.value;
    let y = op.half(plus)?;
    op.fidelity = minus.fidelity(&op.full(plus)?)?;
    op.balance_error = [phi_j.fidelity(&y)?, phi_k.fidelity(&y)?, plus.fidelity(&y)?]
        .iter()
        .map(|p| (p - 0.5).abs())
        .fold(0.0, f64::max);
    op.converged =
        op.fidelity >= settings.fidelity_threshold && op.balance_error <= settings.balance_tolerance;
    Ok(op)
}

#[derive(Debug, Clone)]
pub struct SuperpositionPair {
    pub plus: StateVector,
    pub yplus: StateVector,
    pub j: usize,
    pub k: usize,
    pub converged: bool,
}

/// `|+⟩ = U_{j→k}^{n/2}|Φ_j⟩`, `|y+⟩ = U_{+→−}^{n/2}|+⟩`.
pub fn make_superposition_pair(
    op_jk: &FscOperator,
    op_pm: &FscOperator,
    states: &[StateVector],
) -> Result<SuperpositionPair> {
    let (phi_j, _) = pair_states(states, op_jk.source, op_jk.target)?;
    let plus = op_jk.half(phi_j)?;
    let yplus = op_pm.half(&plus)?;
    Ok(SuperpositionPair {
        plus,
        yplus,
        j: op_jk.source,
        k: op_jk.target,
        converged: op_jk.converged && op_pm.converged,
    })
}

/// `(Φ_j + Φ_k)/√2` and `(Φ_j + iΦ_k)/√2` built directly from amplitudes.
pub fn analytic_pair(phi_j: &StateVector, phi_k: &StateVector, j: usize, k: usize) -> Result<SuperpositionPair> {
    let one = Complex64::new(1.0, 0.0);
    Ok(SuperpositionPair {
        plus: StateVector::superpose(phi_j, one, phi_k, one)?,
        yplus: StateVector::superpose(phi_j, one, phi_k, Complex64::new(0.0, 1.0))?,
        j,
        k,
        converged: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffDiagonalResult {
    pub a: f64,
    pub b: f64,
    pub magnitude: f64,
    pub label: String,
}

impl OffDiagonalResult {
    fn new(a: f64, b: f64, label: &str) -> Self {
        OffDiagonalResult {
            a,
            b,
            magnitude: (a * a + b * b).sqrt(),
            label: label.to_string(),
        }
    }
}

/// Off-diagonal element of `observable` from the superposition pair and the
/// diagonal expectations `o_jj`, `o_kk`.
pub fn extract_offdiagonal(
    pair: &SuperpositionPair,
    observable: &PauliSum,
    o_jj: f64,
    o_kk: f64,
) -> Result<OffDiagonalResult> {
    for s in [&pair.plus, &pair.yplus] {
        if (s.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid(format!("superposition state has norm {}", s.norm())));
        }
    }
    let mean = 0.5 * (o_jj + o_kk);
    let a = pair.plus.expectation(observable)? - mean;
    let b = pair.yplus.expectation(observable)? - mean;
    Ok(OffDiagonalResult::new(a, b, &observable.label))
}

/// `a + ib`-convention element from direct contraction: `a = Re⟨Φ_j|O|Φ_k⟩`,
/// `b = −Im⟨Φ_j|O|Φ_k⟩`.
pub fn direct_offdiagonal(phi_j: &StateVector, phi_k: &StateVector, observable: &PauliSum) -> Result<OffDiagonalResult> {
    if !observable.is_hermitian() {
        return Err(Error::NotHermitian(observable.label.clone()));
    }
    let z = phi_j.matrix_element(observable, phi_k)?;
    Ok(OffDiagonalResult::new(z.re, -z.im, &observable.label))
}

/// Why a state pair was not sent through FSC training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Trained,
    /// The states sit in different (N, Sz) sectors, which the circuits
    /// cannot connect.
    SectorSeparated,
}

#[derive(Debug, Clone)]
pub struct FscPair {
    pub j: usize,
    pub k: usize,
    pub kind: PairKind,
    pub transfer: Option<FscOperator>,
    pub phase: Option<FscOperator>,
    pub pair: Option<SuperpositionPair>,
    /// Hartree; `None` for sector-separated pairs.
    pub h_const: Option<f64>,
    /// Literal evaluation function at the trained transfer operator.
    pub evaluation: Option<f64>,
    pub converged: bool,
}

/// Expectation and variance of a symmetry operator.
fn moments(state: &StateVector, op: &PauliSum) -> Result<(f64, f64)> {
    let mean = state.expectation(op)?;
    let sq = op.multiply(op)?;
    let second = state.expectation(&sq)?;
    Ok((mean, (second - mean * mean).max(0.0)))
}

/// Symmetry operators whose sharp eigenvalues differ between the two states.
fn separating_operators<'a>(
    phi_j: &StateVector,
    phi_k: &StateVector,
    symmetries: &'a [PauliSum],
) -> Result<Vec<&'a PauliSum>> {
    let mut out = Vec::new();
    for s in symmetries {
        let (mj, vj) = moments(phi_j, s)?;
        let (mk, vk) = moments(phi_k, s)?;
        if vj < 1e-8 && vk < 1e-8 && (mj - mk).abs() > 0.25 {
            out.push(s);
        }
    }
    Ok(out)
}

/// One FSC circuit template per state (its sector's ansatz), indexed like `states`.
pub fn train_pairs(
    states: &[StateVector],
    hamiltonian: &PauliSum,
    sector_operators: &[PauliSum],
    templates: &[AnsatzCircuit],
    settings: &FscSettings,
    config: &OptimizerConfig,
) -> Result<Vec<FscPair>> {
    settings.validate()?;
    if templates.len() != states.len() {
        return Err(Error::Invalid(format!(
            "{} circuit templates for {} states",
            templates.len(),
            states.len()
        )));
    }
    let mut jobs = Vec::new();
    for j in 0..states.len() {
        for k in j + 1..states.len() {
            jobs.push((j, k));
        }
    }
    jobs.par_iter()
        .map(|&(j, k)| {
            let separated = !separating_operators(&states[j], &states[k], sector_operators)?.is_empty();
            if separated {
                return Ok(FscPair {
                    j,
                    k,
                    kind: PairKind::SectorSeparated,
                    transfer: None,
                    phase: None,
                    pair: None,
                    h_const: None,
                    evaluation: None,
                    converged: true,
                });
            }
            let pair_config = OptimizerConfig {
                seed: config
                    .seed
                    .wrapping_add(((j * states.len() + k) as u64).wrapping_mul(0x517C_C1B7_2722_0A95)),
                ..config.clone()
            };
            let transfer = optimize_fsc(j, k, states, hamiltonian, &templates[j], settings, &pair_config)?;
            let plus = transfer.half(&states[j])?;
            let phase = optimize_phase_fsc(j, k, &plus, states, &templates[j], settings, &pair_config)?;
            let pair = make_superposition_pair(&transfer, &phase, states)?;
            let hc = h_const(&transfer, states, hamiltonian)?;
            let evaluation = fsc_transfer_objective(&transfer, states, hamiltonian)?;
            Ok(FscPair {
                j,
                k,
                kind: PairKind::Trained,
                converged: pair.converged,
                transfer: Some(transfer),
                phase: Some(phase),
                pair: Some(pair),
                h_const: Some(hc),
                evaluation: Some(evaluation),
            })
        })
        .collect()
}

/// Source of superposition pairs for [`transition_matrix`].
#[derive(Debug, Clone, Copy)]
pub enum Method<'a> {
    Fsc(&'a [FscPair]),
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionCell {
    pub j: usize,
    pub k: usize,
    /// Per-component results in the observable's own units.
    pub components: Vec<OffDiagonalResult>,
    /// Euclidean norm over components, atomic units; `None` if it could not
    /// be determined.
    pub magnitude: Option<f64>,
    pub magnitude_debye: Option<f64>,
    pub converged: bool,
    pub degenerate: bool,
    /// Zero by a selection rule rather than by extraction.
    pub symmetry_forbidden: bool,
}

/// Upper-triangular matrix of transition magnitudes over `m` states; the
/// diagonal is zero by convention.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMatrix {
    pub label: String,
    pub m: usize,
    /// Euclidean norm over components of each state's own expectation,
    /// atomic units.
    pub diagonal: Vec<f64>,
    pub cells: Vec<TransitionCell>,
}

impl TransitionMatrix {
    pub fn cell(&self, j: usize, k: usize) -> Option<&TransitionCell> {
        let (j, k) = if j <= k { (j, k) } else { (k, j) };
        self.cells.iter().find(|c| c.j == j && c.k == k)
    }

    /// Debye magnitude, zero on the diagonal.
    pub fn debye(&self, j: usize, k: usize) -> Option<f64> {
        if j == k {
            return Some(0.0);
        }
        self.cell(j, k).and_then(|c| c.magnitude_debye)
    }

    pub fn all_converged(&self) -> bool {
        self.cells.iter().all(|c| c.converged)
    }

    /// `√(Σ_a |O_aa|² + 2Σ_{a<b} |O_ab|²)` over a block of states, atomic
    /// units. Unlike single cells, this is independent of the basis chosen
    /// inside a degenerate subspace.
    pub fn block_frobenius(&self, members: &[usize]) -> Option<f64> {
        let mut total = 0.0;
        for (i, &a) in members.iter().enumerate() {
            total += self.diagonal.get(a)?.powi(2);
            for &b in &members[i + 1..] {
                total += 2.0 * self.cell(a, b)?.magnitude?.powi(2);
            }
        }
        Some(total.sqrt())
    }
}

fn commutes(a: &PauliSum, b: &PauliSum) -> Result<bool> {
    Ok(a.commutator(b)?
        .terms()
        .iter()
        .all(|t| t.coefficient.norm() <= 1e-12))
}

/// Fills every pair `j < k` for a vector observable given by its components.
pub fn transition_matrix(
    label: &str,
    states: &[StateVector],
    energies: &[f64],
    components: &[PauliSum],
    sector_operators: &[PauliSum],
    method: Method<'_>,
) -> Result<TransitionMatrix> {
    let m = states.len();
    if m < 2 || energies.len() != m {
        return Err(Error::Invalid(format!(
            "transition matrix needs at least 2 states with energies, got {m} states and {} energies",
            energies.len()
        )));
    }
    let diagonals: Vec<Vec<f64>> = states
        .iter()
        .map(|s| components.iter().map(|o| s.expectation(o)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for j in 0..m {
        for k in j + 1..m {
            let degenerate = (energies[j] - energies[k]).abs() < DEGENERACY_TOLERANCE;
            let mut cell = TransitionCell {
                j,
                k,
                components: Vec::new(),
                magnitude: None,
                magnitude_debye: None,
                converged: true,
                degenerate,
                symmetry_forbidden: false,
            };
            match method {
                Method::Direct => {
                    for o in components {
                        cell.components.push(direct_offdiagonal(&states[j], &states[k], o)?);
                    }
                }
                Method::Fsc(pairs) => {
                    let p = pairs
                        .iter()
                        .find(|p| p.j == j && p.k == k)
                        .ok_or_else(|| Error::Invalid(format!("no FSC pair for ({j}, {k})")))?;
                    match (p.kind, &p.pair) {
                        (PairKind::Trained, Some(pair)) => {
                            cell.converged = p.converged;
                            for (c, o) in components.iter().enumerate() {
                                cell.components.push(extract_offdiagonal(
                                    pair,
                                    o,
                                    diagonals[j][c],
                                    diagonals[k][c],
                                )?);
                            }
                        }
                        _ => {
                            // The element vanishes only if some quantity that
                            // separates the two states is conserved by every
                            // component.
                            let separating = separating_operators(&states[j], &states[k], sector_operators)?;
                            let mut forbidden = false;
                            for s in &separating {
                                let mut all = true;
                                for o in components {
                                    all &= commutes(o, s)?;
                                }
                                forbidden |= all;
                            }
                            cell.symmetry_forbidden = forbidden;
                            cell.converged = forbidden;
                            if forbidden {
                                for o in components {
                                    cell.components.push(OffDiagonalResult::new(0.0, 0.0, &o.label));
                                }
                            }
                        }
                    }
                }
            }
            if !cell.components.is_empty() {
                let au = cell
                    .components
                    .iter()
                    .map(|r| r.magnitude * r.magnitude)
                    .sum::<f64>()
                    .sqrt();
                cell.magnitude = Some(au);
                cell.magnitude_debye = Some(convert_units(au));
            }
            cells.push(cell);
        }
    }
    let diagonal = diagonals
        .iter()
        .map(|d| d.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    Ok(TransitionMatrix {
        label: label.to_string(),
        m,
        diagonal,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliWord;

    fn basis(n: usize, i: usize) -> StateVector {
        StateVector::basis_state(n, i).unwrap()
    }

    #[test]
    fn hand_computed_two_qubit_case() {
        // Φ_j = |00>, Φ_k = |01>, O = X on the differing qubit.
        let (pj, pk) = (basis(2, 0), basis(2, 1));
        let pair = analytic_pair(&pj, &pk, 0, 1).unwrap();
        let o = PauliSum::from_real(&[(1.0, "IX")]).unwrap();
        let r = extract_offdiagonal(&pair, &o, 0.0, 0.0).unwrap();
        assert!((r.a - 1.0).abs() < 1e-15);
        assert!(r.b.abs() < 1e-15);
        assert!((r.magnitude - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_observable_has_no_off_diagonal() {
        let (pj, pk) = (basis(2, 1), basis(2, 2));
        let pair = analytic_pair(&pj, &pk, 0, 1).unwrap();
        let r = extract_offdiagonal(&pair, &PauliSum::identity(2), 1.0, 1.0).unwrap();
        assert!(r.a.abs() < 1e-15 && r.b.abs() < 1e-15);
    }

    #[test]
    fn imaginary_part_sign_convention() {
        // O = Y on one qubit: ⟨0|Y|1⟩ = −i, so b = −Im = 1.
        let (pj, pk) = (basis(1, 0), basis(1, 1));
        let o = PauliSum::from_real(&[(1.0, "Y")]).unwrap();
        let pair = analytic_pair(&pj, &pk, 0, 1).unwrap();
        let r = extract_offdiagonal(&pair, &o, 0.0, 0.0).unwrap();
        let d = direct_offdiagonal(&pj, &pk, &o).unwrap();
        assert!(r.a.abs() < 1e-15 && (r.b - 1.0).abs() < 1e-15);
        assert!((d.a - r.a).abs() < 1e-15 && (d.b - r.b).abs() < 1e-15);
    }

    #[test]
    fn self_transition_is_trivial() {
        let h = PauliSum::from_real(&[(0.3, "ZI"), (0.2, "XX")]).unwrap();
        let c = AnsatzCircuit::new(2, vec![("XY".parse::<PauliWord>().unwrap(), 0)], vec![0.0]).unwrap();
        let states = vec![basis(2, 0)];
        let op = optimize_fsc(0, 0, &states, &h, &c, &FscSettings::default(), &OptimizerConfig::default()).unwrap();
        assert!(op.converged);
        assert_eq!(op.circuit.params(), &[0.0]);
        assert_eq!(h_const(&op, &states, &h).unwrap(), 0.0);
        let f = fsc_transfer_objective(&op, &states, &h).unwrap();
        assert!(f.abs() < 1e-15, "{f}");
    }

    #[test]
    fn h_const_is_the_energy_gap_when_nothing_moves() {
        let h = PauliSum::from_real(&[(0.3, "ZI"), (-0.5, "IZ")]).unwrap();
        let c = AnsatzCircuit::new(2, vec![("XY".parse::<PauliWord>().unwrap(), 0)], vec![0.0]).unwrap();
        let states = vec![basis(2, 0), basis(2, 3)];
        let op = FscOperator::new(c, 2, 0, 1).unwrap();
        let e0 = states[0].expectation(&h).unwrap();
        let e1 = states[1].expectation(&h).unwrap();
        assert!((h_const(&op, &states, &h).unwrap() - (e1 - e0).abs()).abs() < 1e-15);
    }

    #[test]
    fn odd_power_is_rejected() {
        let c = AnsatzCircuit::new(1, vec![], vec![]).unwrap();
        assert!(FscOperator::new(c.clone(), 3, 0, 1).is_err());
        assert!(FscOperator::new(c, 0, 0, 1).is_err());
        let s = FscSettings { n: 3, ..FscSettings::default() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn index_out_of_range() {
        let h = PauliSum::from_real(&[(1.0, "Z")]).unwrap();
        let c = AnsatzCircuit::new(1, vec![], vec![]).unwrap();
        let op = FscOperator::new(c, 2, 0, 5).unwrap();
        assert!(matches!(
            h_const(&op, &[basis(1, 0)], &h),
            Err(Error::IndexOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn minus_is_orthogonal_to_plus() {
        let pj = basis(2, 1);
        let pk = basis(2, 2);
        let plus = StateVector::superpose(&pj, Complex64::new(0.6, 0.0), &pk, Complex64::new(0.0, 0.8)).unwrap();
        let minus = minus_state(&plus, &pj, &pk).unwrap();
        assert!(plus.inner_product(&minus).unwrap().norm() < 1e-15);
        assert!((pj.fidelity(&minus).unwrap() + pk.fidelity(&minus).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_qubit_fsc_builds_both_superpositions() {
        // |0> → |1> by two applications of a single-qubit circuit.
        let h = PauliSum::from_real(&[(0.5, "Z")]).unwrap();
        let c = AnsatzCircuit::new(
            1,
            vec![
                ("Y".parse::<PauliWord>().unwrap(), 0),
                ("Z".parse::<PauliWord>().unwrap(), 1),
                ("X".parse::<PauliWord>().unwrap(), 2),
            ],
            vec![0.0; 3],
        )
        .unwrap();
        let states = vec![basis(1, 0), basis(1, 1)];
        let settings = FscSettings::default();
        let config = OptimizerConfig { seed: 3, ..OptimizerConfig::default() };
        let op = optimize_fsc(0, 1, &states, &h, &c, &settings, &config).unwrap();
        assert!(op.converged, "{op:?}");
        let plus = op.half(&states[0]).unwrap();
        let pm = optimize_phase_fsc(0, 1, &plus, &states, &c, &settings, &config).unwrap();
        assert!(pm.converged, "{pm:?}");
        let pair = make_superposition_pair(&op, &pm, &states).unwrap();
        let x = PauliSum::from_real(&[(1.0, "X")]).unwrap();
        let r = extract_offdiagonal(&pair, &x, 0.0, 0.0).unwrap();
        assert!((r.magnitude - 1.0).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn transition_matrix_direct_on_basis_states() {
        let states = vec![basis(1, 0), basis(1, 1)];
        let x = PauliSum::from_real(&[(1.0, "X")]).unwrap();
        let t = transition_matrix("x", &states, &[0.0, 1.0], &[x], &[], Method::Direct).unwrap();
        assert_eq!(t.cells.len(), 1);
        assert!((t.cell(1, 0).unwrap().magnitude.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(t.debye(0, 0), Some(0.0));
        assert!(transition_matrix("x", &states[..1], &[0.0], &[], &[], Method::Direct).is_err());
    }
}
