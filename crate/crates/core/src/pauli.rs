//! Pauli words and weighted Pauli sums.
//!
//! A word over `n` qubits is stored as a pair of bit masks (`x`, `z`), with
//! qubit 0 as the leftmost character of the string form and the most
//! significant bit of a basis index. `Y` sets both bits.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Terms whose coefficient magnitude falls below this are dropped by [`PauliSum::simplify`].
pub const DROP_THRESHOLD: f64 = 1e-14;

/// Imaginary residue tolerated on a coefficient of a Hermitian sum.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Largest register [`PauliSum::dense_matrix`] will expand by default.
pub const DEFAULT_DENSE_CAP: usize = 12;

const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn rank(self) -> u8 {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Single-qubit product `a·b = i^k · c`, returned as `(k mod 4, c)`.
    fn product(a: Pauli, b: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (a, b) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
        }
    }
}

/// `i^k` for `k` taken mod 4.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Tensor product of single-qubit Paulis over a fixed register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        PauliWord { n, x: 0, z: 0 }
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        let mut w = PauliWord::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            w.set(q, p);
        }
        w
    }

    /// Word with `p` on `qubit` and identity elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut w = PauliWord::identity(n);
        w.set(qubit, p);
        w
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn bit(&self, qubit: usize) -> u64 {
        1u64 << (self.n - 1 - qubit)
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let b = self.bit(qubit);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let b = self.bit(qubit);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    /// Bit mask of qubits the word flips, in basis-index bit order.
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    /// Bit mask of qubits carrying a `Z` or `Y` factor.
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn paulis(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n).map(move |q| self.get(q))
    }

    /// Product `self·other = phase·word`, evaluated qubit by qubit.
    pub fn multiply(&self, other: &PauliWord) -> Result<(Complex64, PauliWord)> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut k = 0u32;
        let mut out = PauliWord::identity(self.n);
        for q in 0..self.n {
            let (kq, p) = Pauli::product(self.get(q), other.get(q));
            k += kq as u32;
            out.set(q, p);
        }
        Ok((i_pow(k), out))
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        let anti = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        anti % 2 == 0
    }

    /// Action on a computational basis state: `w|b⟩ = phase·|b'⟩`.
    pub fn apply_to_basis(&self, index: usize) -> (Complex64, usize) {
        let b = index as u64;
        let sign = (b & self.z).count_ones();
        (i_pow(self.y_count() + 2 * sign), (b ^ self.x) as usize)
    }

    pub fn dense_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim);
        for col in 0..dim {
            let (phase, row) = self.apply_to_basis(col);
            m[(row, col)] = phase;
        }
        m
    }
}

impl Ord for PauliWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for q in 0..self.n {
                match self.get(q).rank().cmp(&other.get(q).rank()) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.paulis() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_QUBITS {
            return Err(Error::Parse(format!("invalid Pauli word length in {s:?}")));
        }
        let paulis = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("invalid Pauli letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliWord::from_paulis(&paulis))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub word: PauliWord,
}

impl PauliTerm {
    pub fn new(coefficient: Complex64, word: PauliWord) -> Result<Self> {
        if !coefficient.re.is_finite() || !coefficient.im.is_finite() {
            return Err(Error::NonFinite(format!("coefficient of {word}")));
        }
        Ok(PauliTerm { coefficient, word })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    Hartree,
    Debye,
    #[default]
    Dimensionless,
}

impl Units {
    pub fn as_str(self) -> &'static str {
        match self {
            Units::Hartree => "hartree",
            Units::Debye => "debye",
            Units::Dimensionless => "dimensionless",
        }
    }
}

impl FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hartree" => Ok(Units::Hartree),
            "debye" => Ok(Units::Debye),
            "dimensionless" => Ok(Units::Dimensionless),
            other => Err(Error::Parse(format!("unknown units {other:?}"))),
        }
    }
}

/// Weighted sum of Pauli words over one register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<PauliTerm>,
    pub label: String,
    pub units: Units,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum {
            n,
            terms: Vec::new(),
            label: String::new(),
            units: Units::default(),
        }
    }

    pub fn identity(n: usize) -> Self {
        PauliSum::from_word(Complex64::new(1.0, 0.0), PauliWord::identity(n))
    }

    pub fn from_word(coefficient: Complex64, word: PauliWord) -> Self {
        let mut s = PauliSum::zero(word.num_qubits());
        s.terms.push(PauliTerm { coefficient, word });
        s
    }

    /// Builds a sum from `(coefficient, word string)` pairs without simplifying.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliWord)>,
    {
        let mut s = PauliSum::zero(n);
        for (c, w) in terms {
            s.push(c, w)?;
        }
        Ok(s)
    }

    /// Convenience constructor for real coefficients given as `(coeff, "XZY")`.
    pub fn from_real(terms: &[(f64, &str)]) -> Result<Self> {
        let n = terms.first().map(|(_, w)| w.len()).unwrap_or(0);
        let mut s = PauliSum::zero(n);
        for (c, w) in terms {
            s.push(Complex64::new(*c, 0.0), w.parse()?)?;
        }
        Ok(s)
    }

    pub fn with_label(mut self, label: impl Into<String>, units: Units) -> Self {
        self.label = label.into();
        self.units = units;
        self
    }

    pub fn push(&mut self, coefficient: Complex64, word: PauliWord) -> Result<()> {
        if word.num_qubits() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: word.num_qubits(),
            });
        }
        self.terms.push(PauliTerm::new(coefficient, word)?);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges like words, drops negligible terms and sorts by word.
    pub fn simplify(&self) -> PauliSum {
        let mut sorted = self.terms.clone();
        sorted.sort_by(|a, b| a.word.cmp(&b.word));
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(sorted.len());
        for t in sorted {
            match merged.last_mut() {
                Some(last) if last.word == t.word => last.coefficient += t.coefficient,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient.norm() >= DROP_THRESHOLD);
        PauliSum {
            n: self.n,
            terms: merged,
            label: self.label.clone(),
            units: self.units,
        }
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coefficient *= factor;
        }
        out
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = self.clone();
        out.terms.extend_from_slice(&other.terms);
        Ok(out.simplify())
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = PauliSum::zero(self.n);
        for a in &self.terms {
            for b in &other.terms {
                let (phase, w) = a.word.multiply(&b.word)?;
                out.terms.push(PauliTerm {
                    coefficient: phase * a.coefficient * b.coefficient,
                    word: w,
                });
            }
        }
        Ok(out.simplify())
    }

    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.multiply(other)?.sub(&other.multiply(self)?)
    }

    pub fn adjoint(&self) -> PauliSum {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coefficient = t.coefficient.conj();
        }
        out
    }

    /// True when every coefficient is real within [`HERMITIAN_TOLERANCE`].
    pub fn is_hermitian(&self) -> bool {
        self.simplify()
            .terms
            .iter()
            .all(|t| t.coefficient.im.abs() <= HERMITIAN_TOLERANCE)
    }

    /// True when every coefficient is imaginary within [`HERMITIAN_TOLERANCE`].
    pub fn is_anti_hermitian(&self) -> bool {
        self.simplify()
            .terms
            .iter()
            .all(|t| t.coefficient.re.abs() <= HERMITIAN_TOLERANCE)
    }

    /// Sum of absolute coefficients; an upper bound on the spectral radius.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).sum()
    }

    /// Non-identity words of the simplified sum, in canonical order.
    pub fn non_identity_words(&self) -> Vec<PauliWord> {
        self.simplify()
            .terms
            .iter()
            .map(|t| t.word)
            .filter(|w| !w.is_identity())
            .collect()
    }

    pub fn dense_matrix(&self) -> Result<CMatrix> {
        self.dense_matrix_capped(DEFAULT_DENSE_CAP)
    }

    pub fn dense_matrix_capped(&self, cap: usize) -> Result<CMatrix> {
        if self.n > cap {
            return Err(Error::TooLarge {
                qubits: self.n,
                cap,
            });
        }
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim);
        for t in &self.terms {
            for col in 0..dim {
                let (phase, row) = t.word.apply_to_basis(col);
                m[(row, col)] += t.coefficient * phase;
            }
        }
        Ok(m)
    }

    fn check_size(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Parses the line-oriented text format (header, then `re im word` per line).
    pub fn parse_text(text: &str) -> Result<PauliSum> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(l).trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty Pauli sum file".into()))?;
        let mut n = None;
        let mut label = String::new();
        let mut units = Units::Dimensionless;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header field {field:?}")))?;
            match key {
                "qubits" => {
                    n = Some(value.parse::<usize>().map_err(|_| {
                        Error::Parse(format!("invalid qubit count {value:?}"))
                    })?)
                }
                "label" => label = value.to_string(),
                "units" => units = value.parse()?,
                other => return Err(Error::Parse(format!("unknown header key {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("header is missing qubits=<n>".into()))?;
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Parse(format!("unsupported qubit count {n}")));
        }
        let mut sum = PauliSum::zero(n).with_label(label, units);
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [re, im, word] = fields[..] else {
                return Err(Error::Parse(format!(
                    "line {lineno}: expected `<re> <im> <word>`"
                )));
            };
            let re = parse_f64(re, lineno)?;
            let im = parse_f64(im, lineno)?;
            let word: PauliWord = word.parse()?;
            if word.num_qubits() != n {
                return Err(Error::Parse(format!(
                    "line {lineno}: word {word} has {} qubits, header says {n}",
                    word.num_qubits()
                )));
            }
            sum.push(Complex64::new(re, im), word)
                .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
        }
        Ok(sum)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "qubits={} label={} units={}\n",
            self.n,
            if self.label.is_empty() { "unnamed" } else { &self.label },
            self.units.as_str()
        );
        for t in &self.terms {
            out.push_str(&format!(
                "{} {} {}\n",
                crate::format::sig17(t.coefficient.re),
                crate::format::sig17(t.coefficient.im),
                t.word
            ));
        }
        out
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<PauliSum> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PauliSum::parse_text(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_f64(s: &str, lineno: usize) -> Result<f64> {
    // str::parse is locale-independent; it only accepts '.' as decimal point.
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("line {lineno}: invalid number {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("line {lineno}: {s}")));
    }
    Ok(v)
}
