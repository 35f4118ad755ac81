//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by matrix primitives, channels and the work-extraction layer.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix handed to the Hermitian eigensolver deviates from M = M†.
    #[error("matrix is not Hermitian: max |M - M†| entry is {deviation:.3e}")]
    NonHermitian { deviation: f64 },

    /// A joint system⊗qubit matrix must have even dimension.
    #[error("joint matrix dimension {dim} is odd; expected a system ⊗ qubit layout")]
    OddDimension { dim: usize },

    /// Two operands act on spaces of different dimension.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// The operation is defined for two-level systems only.
    #[error("operation requires a qubit (d = 2), got d = {dim}")]
    NotQubit { dim: usize },

    /// A channel or measurement parameter lies outside its admissible interval.
    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Raw entries do not form a well-shaped matrix.
    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    /// A matrix fails the density-matrix invariants (Hermitian, unit trace,
    /// positive semidefinite).
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    /// A Hamiltonian fails its invariants (ascending energies, orthonormal
    /// eigenbasis).
    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),
}

pub type Result<T> = std::result::Result<T, Error>;
