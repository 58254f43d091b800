//! Exact reference values from dense diagonalization.
//!
//! Everything here works on dense matrices built straight from the Pauli
//! sums, so it shares no code path with the statevector simulator beyond
//! the word-to-matrix expansion.

use num_complex::Complex64;
use serde::Serialize;

use crate::fermion::{symmetry_operators, SymmetryOperators};
use crate::linalg::{eigh, CMatrix};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;
use crate::vqe::SectorTarget;
use crate::{Error, Result};

/// Eigenvalues closer than this are treated as one degenerate level when
/// fixing the eigenbasis.
const LEVEL_TOLERANCE: f64 = 1e-8;
/// Symmetry eigenvalues closer than this share a sub-block.
const LABEL_TOLERANCE: f64 = 1e-6;
/// Energy gap below which a pair of states counts as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorLabel {
    pub number: f64,
    pub sz: f64,
    pub s2: f64,
}

impl SectorLabel {
    pub fn matches(&self, target: &SectorTarget, tol: f64) -> bool {
        (self.number - target.electrons as f64).abs() <= tol
            && (self.sz - target.sz).abs() <= tol
            && (self.s2 - target.s2).abs() <= tol
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReference {
    /// Ascending, in the Hamiltonian's units.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns.
    pub eigenvectors: CMatrix,
    /// `(N, Sz, S²)` expectations, when the register has an even qubit count.
    pub labels: Vec<Option<SectorLabel>>,
}

impl SpectrumReference {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, index: usize) -> Vec<Complex64> {
        self.eigenvectors.column(index)
    }

    pub fn state(&self, index: usize) -> Result<StateVector> {
        StateVector::from_amplitudes(self.vector(index))
    }

    /// For each target in order, the lowest unused eigenvector in its sector.
    pub fn select(&self, targets: &[SectorTarget]) -> Result<Vec<usize>> {
        let mut used = vec![false; self.len()];
        targets
            .iter()
            .map(|t| {
                let idx = (0..self.len())
                    .find(|&i| {
                        !used[i]
                            && self.labels[i]
                                .map(|l| l.matches(t, 1e-6))
                                .unwrap_or(false)
                    })
                    .ok_or_else(|| {
                        Error::Invalid(format!(
                            "no unused eigenvector in sector N={} Sz={} S²={}",
                            t.electrons, t.sz, t.s2
                        ))
                    })?;
                used[idx] = true;
                Ok(idx)
            })
            .collect()
    }
}

pub fn diagonalize(h: &PauliSum) -> Result<SpectrumReference> {
    let n = h.num_qubits();
    let symmetry = if n % 2 == 0 {
        Some(symmetry_operators(n)?)
    } else {
        None
    };
    diagonalize_with(h, symmetry.as_ref())
}

/// Full spectrum; degenerate levels are rotated to diagonalize N, then Sz,
/// then S², and ordered by ascending Sz then S².
pub fn diagonalize_with(h: &PauliSum, symmetry: Option<&SymmetryOperators>) -> Result<SpectrumReference> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian(h.label.clone()));
    }
    let hm = h.dense_matrix()?;
    let eig = eigh(&hm);
    let dim = hm.dim();
    let mut columns: Vec<Vec<Complex64>> = (0..dim).map(|i| eig.vectors.column(i)).collect();
    let values = eig.values.clone();

    let sym_mats = match symmetry {
        Some(s) => Some([
            s.number.dense_matrix()?,
            s.sz.dense_matrix()?,
            s.s2.dense_matrix()?,
        ]),
        None => None,
    };

    if let Some(mats) = &sym_mats {
        let mut start = 0;
        while start < dim {
            let mut end = start + 1;
            while end < dim && values[end] - values[end - 1] < LEVEL_TOLERANCE {
                end += 1;
            }
            if end - start > 1 {
                let mut block = columns[start..end].to_vec();
                block = refine(block, mats, 0);
                block.sort_by(|a, b| {
                    let la = label_of(a, mats);
                    let lb = label_of(b, mats);
                    la.sz
                        .total_cmp(&lb.sz)
                        .then(la.s2.total_cmp(&lb.s2))
                        .then(la.number.total_cmp(&lb.number))
                });
                for (k, v) in block.into_iter().enumerate() {
                    columns[start + k] = v;
                }
            }
            start = end;
        }
    }

    let mut eigenvectors = CMatrix::zeros(dim);
    for (c, v) in columns.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            eigenvectors[(r, c)] = *x;
        }
    }
    let labels = columns
        .iter()
        .map(|v| sym_mats.as_ref().map(|m| label_of(v, m)))
        .collect();
    Ok(SpectrumReference {
        eigenvalues: values,
        eigenvectors,
        labels,
    })
}

fn rayleigh(m: &CMatrix, v: &[Complex64]) -> f64 {
    let mv = m.matvec(v);
    v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
}

fn label_of(v: &[Complex64], mats: &[CMatrix; 3]) -> SectorLabel {
    SectorLabel {
        number: rayleigh(&mats[0], v),
        sz: rayleigh(&mats[1], v),
        s2: rayleigh(&mats[2], v),
    }
}

/// Diagonalizes `mats[level]` inside the span of `block`, then recurses into
/// each group of equal eigenvalues with the next operator.
fn refine(block: Vec<Vec<Complex64>>, mats: &[CMatrix; 3], level: usize) -> Vec<Vec<Complex64>> {
    if level >= mats.len() || block.len() < 2 {
        return block;
    }
    let d = block.len();
    let op = &mats[level];
    let applied: Vec<Vec<Complex64>> = block.iter().map(|v| op.matvec(v)).collect();
    let mut small = CMatrix::zeros(d);
    for a in 0..d {
        for b in 0..d {
            small[(a, b)] = block[a].iter().zip(&applied[b]).map(|(x, y)| x.conj() * y).sum();
        }
    }
    let eig = eigh(&small);
    let rotated: Vec<Vec<Complex64>> = (0..d)
        .map(|k| {
            let mut v = vec![Complex64::new(0.0, 0.0); block[0].len()];
            for (a, col) in block.iter().enumerate() {
                let coeff = eig.vectors[(a, k)];
                for (out, x) in v.iter_mut().zip(col) {
                    *out += coeff * x;
                }
            }
            v
        })
        .collect();
    let mut out = Vec::with_capacity(d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eig.values[end] - eig.values[end - 1] < LABEL_TOLERANCE {
            end += 1;
        }
        out.extend(refine(rotated[start..end].to_vec(), mats, level + 1));
        start = end;
    }
    out
}

/// A set of (near-)degenerate selected states and the basis-independent
/// Frobenius norm of the observable restricted to them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateBlock {
    /// Positions within the selected index list.
    pub members: Vec<usize>,
    pub frobenius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMoments {
    /// `|v_j† O v_k|` over the selected indices; the diagonal holds `|⟨O⟩|`.
    pub magnitudes: Vec<Vec<f64>>,
    pub degenerate_blocks: Vec<DegenerateBlock>,
}

/// Groups positions whose energies lie within [`DEGENERACY_TOLERANCE`] of a
/// neighbour.
pub fn degenerate_groups(energies: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if (energies[i] - energies[*g.last().unwrap()]).abs() < DEGENERACY_TOLERANCE => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups.retain(|g| g.len() > 1);
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}

/// Exact transition moments for a vector observable given as components;
/// magnitudes combine per-component moduli in Euclidean norm.
pub fn exact_transition_moments(
    spectrum: &SpectrumReference,
    components: &[PauliSum],
    indices: &[usize],
) -> Result<TransitionMoments> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= spectrum.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            limit: spectrum.len(),
        });
    }
    let m = indices.len();
    let vectors: Vec<Vec<Complex64>> = indices.iter().map(|&i| spectrum.vector(i)).collect();
    let mut squared = vec![vec![0.0; m]; m];
    for op in components {
        let dense = op.dense_matrix()?;
        if dense.dim() != spectrum.eigenvectors.dim() {
            return Err(Error::QubitMismatch {
                expected: spectrum.eigenvectors.dim().trailing_zeros() as usize,
                found: op.num_qubits(),
            });
        }
        let applied: Vec<Vec<Complex64>> = vectors.iter().map(|v| dense.matvec(v)).collect();
        for j in 0..m {
            for k in j..m {
                let elem: Complex64 = vectors[j].iter().zip(&applied[k]).map(|(a, b)| a.conj() * b).sum();
                squared[j][k] += elem.norm_sqr();
                if k != j {
                    squared[k][j] = squared[j][k];
                }
            }
        }
    }
    let magnitudes: Vec<Vec<f64>> = squared
        .iter()
        .map(|row| row.iter().map(|v| v.sqrt()).collect())
        .collect();
    let energies: Vec<f64> = indices.iter().map(|&i| spectrum.eigenvalues[i]).collect();
    let degenerate_blocks = degenerate_groups(&energies)
        .into_iter()
        .map(|members| {
            let frob = members
                .iter()
                .flat_map(|&a| members.iter().map(move |&b| (a, b)))
                .map(|(a, b)| squared[a][b])
                .sum::<f64>()
                .sqrt();
            DegenerateBlock {
                members,
                frobenius: frob,
            }
        })
        .collect();
    Ok(TransitionMoments {
        magnitudes,
        degenerate_blocks,
    })
}

/// `log10|e − reference|`, or `-inf` when the two agree below 1e-15.
pub fn log_error(e: f64, reference: f64) -> f64 {
    let diff = (e - reference).abs();
    if diff < 1e-15 {
        f64::NEG_INFINITY
    } else {
        diff.log10()
    }
}

/// Text form of [`log_error`]; the exact sentinel prints as `exact`.
pub fn format_log_error(value: f64) -> String {
    if value == f64::NEG_INFINITY {
        "exact".to_string()
    } else {
        crate::format::sig17(value)
    }
}
