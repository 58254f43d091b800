//! Variational eigenstates and transition matrix elements on an exact
//! statevector simulator.
//!
//! The crate builds Pauli-sum operators, Jordan–Wigner mapped UCCSD
//! generators, a Trotterized ansatz, VQE/VQD/SSVQE drivers and frame
//! superposition cluster (FSC) operators. FSC operators transfer one
//! variational state into another in `n` applications; half of the
//! transfer produces the equal superpositions that expose off-diagonal
//! observable elements. A dense exact-diagonalization oracle is kept
//! independent of the variational path for validation.

pub mod ansatz;
pub mod config;
pub mod fermion;
pub mod format;
pub mod fsc;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod pauli;
pub mod report;
pub mod statevector;
pub mod vqe;

use std::path::{Path, PathBuf};

pub use num_complex::Complex64;

pub use ansatz::{AnsatzCircuit, AnsatzSpec};
pub use fermion::{GeneratorSet, LadderProduct, SymmetryOperators};
pub use fsc::{FscOperator, OffDiagonalResult, SuperpositionPair, TransitionMatrix};
pub use optimize::OptimizerConfig;
pub use oracle::SpectrumReference;
pub use pauli::{Pauli, PauliSum, PauliTerm, PauliWord, Units};
pub use statevector::StateVector;
pub use vqe::{VqeProblem, VqeResult};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },
    #[error("register of {qubits} qubits exceeds the dense cap of {cap}")]
    TooLarge { qubits: usize, cap: usize },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("operator {0:?} is not Hermitian")]
    NotHermitian(String),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("parameter vector has length {found}, circuit expects {expected}")]
    ParameterMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
