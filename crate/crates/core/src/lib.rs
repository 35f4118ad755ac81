//! Ergotropy and daemonic work extraction for pairs of CPTP maps applied in a
//! coherently controlled order.
//!
//! The crate is organized bottom-up:
//!
//! - [`matcore`]: dense complex-matrix primitives: Hermitian eigendecomposition
//!   with a deterministic ordering, tensor products with a qubit factor, partial
//!   trace and projections over a control qubit.
//! - [`channels`]: Kraus-operator CPTP channels and the channel zoo
//!   (depolarizing, thermalizing, generalized amplitude damping, phase flip).
//! - [`switch`]: the quantum-switch supermap: joint output state, cross-map,
//!   classically controlled output, conditional post-measurement states, the
//!   gain operator and the non-commutative cross-map decomposition.
//! - [`ergotropy`]: ergotropy and passive states, the incoherent/coherent
//!   split, daemonic ergotropy with measurement optimization, and zero-gain
//!   condition checks.
//! - [`scenarios`]: closed-form oracles for the depolarizing, thermalizing and
//!   amplitude-damping/phase-flip channel families, checked against the generic
//!   pipeline.
//! - [`sampling`]: seeded random states, specs and channel pairs for
//!   verification suites.

pub mod channels;
pub mod ergotropy;
pub mod error;
pub mod matcore;
pub mod sampling;
pub mod scenarios;
pub mod switch;
pub mod tol;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, DensityMatrix, SpectralDecomposition};
