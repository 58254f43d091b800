//! Fermionic ladder operators, the Jordan–Wigner map, UCCSD excitation
//! generators and spin/particle-number operators.
//!
//! Spin orbitals are interleaved: spatial orbital `i` holds α at qubit `2i`
//! and β at qubit `2i + 1`.

use num_complex::Complex64;

use crate::pauli::{Pauli, PauliSum, PauliWord, Units};
use crate::{Error, Result};

/// Product of creation/annihilation operators, applied right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderProduct {
    /// `(spin-orbital index, is_creation)` in written order.
    pub factors: Vec<(usize, bool)>,
    pub coefficient: Complex64,
}

impl LadderProduct {
    pub fn new(factors: Vec<(usize, bool)>, coefficient: Complex64) -> Self {
        LadderProduct {
            factors,
            coefficient,
        }
    }

    /// `a_p† a_q`.
    pub fn hopping(p: usize, q: usize) -> Self {
        LadderProduct::new(vec![(p, true), (q, false)], Complex64::new(1.0, 0.0))
    }

    /// `a_p† a_q† a_r a_s`.
    pub fn double(p: usize, q: usize, r: usize, s: usize) -> Self {
        LadderProduct::new(
            vec![(p, true), (q, true), (r, false), (s, false)],
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn adjoint(&self) -> Self {
        LadderProduct {
            factors: self.factors.iter().rev().map(|&(p, d)| (p, !d)).collect(),
            coefficient: self.coefficient.conj(),
        }
    }
}

/// JW image of a single ladder operator.
pub fn ladder_operator(p: usize, creation: bool, n_spin_orbitals: usize) -> Result<PauliSum> {
    if p >= n_spin_orbitals {
        return Err(Error::IndexOutOfRange {
            index: p,
            limit: n_spin_orbitals,
        });
    }
    let mut x = PauliWord::identity(n_spin_orbitals);
    for q in 0..p {
        x.set(q, Pauli::Z);
    }
    let mut y = x;
    x.set(p, Pauli::X);
    y.set(p, Pauli::Y);
    let y_coeff = if creation { -0.5 } else { 0.5 };
    PauliSum::from_terms(
        n_spin_orbitals,
        [
            (Complex64::new(0.5, 0.0), x),
            (Complex64::new(0.0, y_coeff), y),
        ],
    )
}

pub fn jordan_wigner(product: &LadderProduct, n_spin_orbitals: usize) -> Result<PauliSum> {
    let mut acc = PauliSum::identity(n_spin_orbitals).scale(product.coefficient);
    for &(p, creation) in &product.factors {
        acc = acc.multiply(&ladder_operator(p, creation, n_spin_orbitals)?)?;
    }
    Ok(acc.simplify())
}

/// Anti-Hermitian excitation generators `T − T†` in JW form.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub n_spin_orbitals: usize,
    pub generators: Vec<PauliSum>,
    pub labels: Vec<String>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Total number of Pauli words over all generators.
    pub fn word_count(&self) -> usize {
        self.generators.iter().map(PauliSum::len).sum()
    }
}

fn is_alpha(p: usize) -> bool {
    p % 2 == 0
}

/// Generators for the Hartree–Fock determinant with the lowest
/// `n_electrons` spin orbitals filled.
pub fn uccsd_generators(n_spin_orbitals: usize, n_electrons: usize) -> Result<GeneratorSet> {
    if n_electrons == 0 || n_electrons >= n_spin_orbitals {
        return Err(Error::Invalid(format!(
            "need 0 < electrons < spin orbitals, got {n_electrons} electrons in {n_spin_orbitals}"
        )));
    }
    let occupied: Vec<usize> = (0..n_electrons).collect();
    uccsd_generators_for_occupation(n_spin_orbitals, &occupied)
}

/// Spin-preserving singles and Sz-preserving doubles out of an arbitrary
/// reference determinant.
pub fn uccsd_generators_for_occupation(
    n_spin_orbitals: usize,
    occupied: &[usize],
) -> Result<GeneratorSet> {
    if let Some(&bad) = occupied.iter().find(|&&p| p >= n_spin_orbitals) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            limit: n_spin_orbitals,
        });
    }
    let mut occ = occupied.to_vec();
    occ.sort_unstable();
    occ.dedup();
    if occ.is_empty() || occ.len() >= n_spin_orbitals {
        return Err(Error::Invalid(format!(
            "need 0 < electrons < spin orbitals, got {} electrons in {n_spin_orbitals}",
            occ.len()
        )));
    }
    let virt: Vec<usize> = (0..n_spin_orbitals).filter(|p| !occ.contains(p)).collect();

    let mut generators = Vec::new();
    let mut labels = Vec::new();
    let mut push = |t: LadderProduct, label: String| -> Result<()> {
        let g = jordan_wigner(&t, n_spin_orbitals)?
            .sub(&jordan_wigner(&t.adjoint(), n_spin_orbitals)?)?;
        if !g.is_empty() {
            generators.push(g.with_label(label.clone(), Units::Dimensionless));
            labels.push(label);
        }
        Ok(())
    };

    for &i in &occ {
        for &a in &virt {
            if is_alpha(i) == is_alpha(a) {
                push(LadderProduct::hopping(a, i), format!("single {i}->{a}"))?;
            }
        }
    }
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y + 1..] {
                    let alpha_out = is_alpha(i) as u8 + is_alpha(j) as u8;
                    let alpha_in = is_alpha(a) as u8 + is_alpha(b) as u8;
                    if alpha_out == alpha_in {
                        push(
                            LadderProduct::double(a, b, j, i),
                            format!("double {i},{j}->{a},{b}"),
                        )?;
                    }
                }
            }
        }
    }
    Ok(GeneratorSet {
        n_spin_orbitals,
        generators,
        labels,
    })
}

/// Particle number, spin projection and total spin in JW form.
#[derive(Debug, Clone)]
pub struct SymmetryOperators {
    pub number: PauliSum,
    pub sz: PauliSum,
    pub s2: PauliSum,
}

pub fn symmetry_operators(n_spin_orbitals: usize) -> Result<SymmetryOperators> {
    if n_spin_orbitals == 0 || n_spin_orbitals % 2 != 0 {
        return Err(Error::Invalid(format!(
            "symmetry operators need an even spin-orbital count, got {n_spin_orbitals}"
        )));
    }
    let n = n_spin_orbitals;
    let mut number = PauliSum::zero(n);
    let mut sz = PauliSum::zero(n);
    for p in 0..n {
        let np = jordan_wigner(&LadderProduct::hopping(p, p), n)?;
        number = number.add(&np)?;
        let sign = if is_alpha(p) { 0.5 } else { -0.5 };
        sz = sz.add(&np.scale(Complex64::new(sign, 0.0)))?;
    }
    let mut s_plus = PauliSum::zero(n);
    let mut s_minus = PauliSum::zero(n);
    for i in 0..n / 2 {
        s_plus = s_plus.add(&jordan_wigner(&LadderProduct::hopping(2 * i, 2 * i + 1), n)?)?;
        s_minus = s_minus.add(&jordan_wigner(&LadderProduct::hopping(2 * i + 1, 2 * i), n)?)?;
    }
    // S² = S₋S₊ + Sz² + Sz
    let s2 = s_minus
        .multiply(&s_plus)?
        .add(&sz.multiply(&sz)?)?
        .add(&sz)?;
    Ok(SymmetryOperators {
        number: number.with_label("number", Units::Dimensionless),
        sz: sz.with_label("sz", Units::Dimensionless),
        s2: s2.with_label("s2", Units::Dimensionless),
    })
}

/// Basis index of the determinant with the given spin orbitals occupied.
pub fn determinant_index(n_spin_orbitals: usize, occupied: &[usize]) -> Result<usize> {
    let mut index = 0usize;
    for &p in occupied {
        if p >= n_spin_orbitals {
            return Err(Error::IndexOutOfRange {
                index: p,
                limit: n_spin_orbitals,
            });
        }
        index |= 1 << (n_spin_orbitals - 1 - p);
    }
    Ok(index)
}

/// Aufbau occupation for `n_electrons` with spin projection `sz`: α and β
/// electrons each fill the lowest spatial orbitals.
pub fn aufbau_occupation(n_spin_orbitals: usize, n_electrons: usize, sz: f64) -> Result<Vec<usize>> {
    let n_alpha_f = n_electrons as f64 / 2.0 + sz;
    let n_alpha = n_alpha_f.round();
    if (n_alpha - n_alpha_f).abs() > 1e-9 || n_alpha < 0.0 || n_alpha > n_electrons as f64 {
        return Err(Error::Invalid(format!(
            "no determinant with {n_electrons} electrons and Sz = {sz}"
        )));
    }
    let n_alpha = n_alpha as usize;
    let n_beta = n_electrons - n_alpha;
    let n_spatial = n_spin_orbitals / 2;
    if n_alpha > n_spatial || n_beta > n_spatial {
        return Err(Error::Invalid(format!(
            "{n_alpha} α and {n_beta} β electrons do not fit in {n_spatial} spatial orbitals"
        )));
    }
    let mut occ: Vec<usize> = (0..n_alpha)
        .map(|i| 2 * i)
        .chain((0..n_beta).map(|i| 2 * i + 1))
        .collect();
    occ.sort_unstable();
    Ok(occ)
}
