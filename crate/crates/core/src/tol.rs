//! Numerical tolerances shared across the crate.
//!
//! All comparisons use absolute tolerances: every matrix handled here lives at
//! scale ‖ρ‖ ≤ 1, so absolute and relative tolerances coincide.

/// Maximum entrywise |M − M†| accepted by the Hermitian eigensolver.
pub const HERMITICITY: f64 = 1e-10;

/// Frobenius-norm tolerance for spectral reconstruction Σ_k r_k |r_k⟩⟨r_k| = M.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Eigenvalues closer than this are treated as degenerate when ordering
/// eigenvectors deterministically.
pub const EIGEN_TIE: f64 = 1e-10;

/// Frobenius-norm tolerance on Σ K†K − 𝟙 for a channel to count as CPTP.
pub const COMPLETENESS: f64 = 1e-9;

/// Measurement outcomes with probability at or below this floor are flagged
/// degenerate and contribute zero to daemonic sums.
pub const P_FLOOR: f64 = 1e-12;

/// Validation tolerance for density matrices (Hermiticity, unit trace,
/// positivity of the smallest eigenvalue).
pub const DENSITY: f64 = 1e-9;

/// Default tolerance for passivity tests.
pub const PASSIVITY: f64 = 1e-9;

/// Spectral gaps below this make the zero-gain checker report indeterminate
/// rather than guess an eigenbasis ordering.
pub const NEAR_DEGENERATE: f64 = 1e-8;

/// Residual tolerance for the zero-gain commutator and ordering conditions.
pub const ZERO_GAIN: f64 = 1e-10;

/// Energy levels closer than this are treated as one degenerate block, exempt
/// from population ordering (any reordering inside the block is a zero-work
/// unitary).
pub const ENERGY_DEGENERATE: f64 = 1e-12;
