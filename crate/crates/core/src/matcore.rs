//! Dense complex-matrix primitives.
//!
//! Everything in this module is a pure function over immutable values, so
//! concurrent use needs no coordination. Matrices are small (d ≲ 64) dense
//! row-major buffers of `Complex<f64>`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

/// Complex 1 and 0.
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// A dense square complex matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    /// Zero matrix of dimension `dim`.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    /// Identity matrix of dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(k, k, ONE);
        }
        m
    }

    /// Build from a row-major entry buffer; `entries.len()` must be `dim²`.
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Diagonal matrix from real values.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &v) in diag.iter().enumerate() {
            m.set(k, k, C64::new(v, 0.0));
        }
        m
    }

    /// Rank-one matrix |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose M†.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    /// Frobenius norm ‖M‖₂.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise magnitude of M − N.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entrywise |M − M†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermiticity_deviation() <= tolerance
    }

    /// Commutator [M, N] = MN − NM.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Anticommutator {M, N} = MN + NM.
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    /// M + M†, the Hermitian part doubled.
    pub fn plus_adjoint(&self) -> Self {
        self.add(&self.adjoint())
    }

    /// Expectation ⟨v|M|v⟩.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        assert_eq!(v.len(), self.dim);
        let mut acc = ZERO;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += v[i].conj() * self.get(i, j) * v[j];
            }
        }
        acc
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

/// Spectral decomposition of a Hermitian matrix with eigenvalues sorted in
/// decreasing order and a reproducible choice of eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Real eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvector columns aligned with `eigenvalues`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl SpectralDecomposition {
    /// Reassemble Σ_k r_k |r_k⟩⟨r_k|.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.eigenvalues.len();
        let mut m = ComplexMatrix::zeros(d);
        for (r, vec) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m = m.add(&ComplexMatrix::outer(vec, vec).scale_re(*r));
        }
        m
    }
}

/// Index of the largest-magnitude component (first one on exact ties).
fn pivot_index(v: &[C64]) -> usize {
    let mut best = 0;
    let mut best_mag = v[0].norm_sqr();
    for (k, c) in v.iter().enumerate().skip(1) {
        let mag = c.norm_sqr();
        if mag > best_mag {
            best = k;
            best_mag = mag;
        }
    }
    best
}

/// Rotate the global phase so the pivot component is real positive.
fn fix_phase(v: &mut [C64]) {
    let p = pivot_index(v);
    let c = v[p];
    if c.norm() > 0.0 {
        let phase = c.conj() / C64::new(c.norm(), 0.0);
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come out in decreasing order. Within clusters of eigenvalues
/// equal to within [`tol::EIGEN_TIE`], eigenvectors are ordered by the index
/// of their largest-magnitude component; every eigenvector's global phase is
/// fixed so that component is real positive. This keeps passive states
/// reproducible under degeneracy.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let deviation = m.hermiticity_deviation();
    if deviation > tol::HERMITICITY {
        return Err(Error::NonHermitian { deviation });
    }
    let d = m.dim();
    // Symmetrize to scrub roundoff before handing off to the solver.
    let sym = m.add(&m.adjoint()).scale_re(0.5);
    let eig = sym.to_nalgebra().symmetric_eigen();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });

    let mut eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    for v in &mut eigenvectors {
        fix_phase(v);
    }

    // Deterministic order inside degenerate clusters.
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (eigenvalues[end - 1] - eigenvalues[end]).abs() <= tol::EIGEN_TIE {
            end += 1;
        }
        if end - start > 1 {
            let mut cluster: Vec<(usize, f64, Vec<C64>)> = (start..end)
                .map(|k| {
                    (
                        pivot_index(&eigenvectors[k]),
                        eigenvalues[k],
                        std::mem::take(&mut eigenvectors[k]),
                    )
                })
                .collect();
            cluster.sort_by_key(|(pivot, _, _)| *pivot);
            for (offset, (_, val, vec)) in cluster.into_iter().enumerate() {
                eigenvalues[start + offset] = val;
                eigenvectors[start + offset] = vec;
            }
        }
        start = end;
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Kronecker product S ⊗ Q with the qubit Q as the fast (inner) index:
/// entry ((m,j),(n,k)) = S_{mn} Q_{jk}.
pub fn tensor_with_qubit(s: &ComplexMatrix, q: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(q.dim(), 2, "second factor must be a qubit operator");
    let d = s.dim();
    let mut out = ComplexMatrix::zeros(2 * d);
    for m in 0..d {
        for n in 0..d {
            let smn = s.get(m, n);
            for j in 0..2 {
                for k in 0..2 {
                    out.set(2 * m + j, 2 * n + k, smn * q.get(j, k));
                }
            }
        }
    }
    out
}

/// Trace out the qubit factor: (out)_{mn} = Σ_{j∈{0,1}} J_{(m,j),(n,j)}.
pub fn partial_trace_q(joint: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = joint.dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::OddDimension { dim });
    }
    let d = dim / 2;
    Ok(ComplexMatrix::from_fn(d, |m, n| {
        joint.get(2 * m, 2 * n) + joint.get(2 * m + 1, 2 * n + 1)
    }))
}

/// Post-measurement system state after projecting the control qubit of a
/// joint state onto the pure state `v`.
///
/// Returns the outcome probability p = Tr[(𝟙 ⊗ |v⟩⟨v|) J] together with the
/// renormalized system state. Outcomes with p ≤ [`tol::P_FLOOR`] are flagged
/// [`ConditionalState::Degenerate`]; their weight is too small to renormalize
/// meaningfully and they contribute zero to daemonic sums.
pub fn project_q(joint: &ComplexMatrix, v: &[C64; 2]) -> Result<(f64, ConditionalState)> {
    let dim = joint.dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::OddDimension { dim });
    }
    let d = dim / 2;
    debug_assert!(
        ((v[0].norm_sqr() + v[1].norm_sqr()).sqrt() - 1.0).abs() <= 1e-10,
        "projection vector must be normalized"
    );
    // (out)_{mn} = ⟨v| J^{(m,n)} |v⟩ over the 2×2 qubit block of each (m,n).
    let unnorm = ComplexMatrix::from_fn(d, |m, n| {
        let mut acc = ZERO;
        for k in 0..2 {
            for j in 0..2 {
                acc += v[k].conj() * joint.get(2 * m + k, 2 * n + j) * v[j];
            }
        }
        acc
    });
    let p = unnorm.trace().re.max(0.0);
    if p <= tol::P_FLOOR {
        return Ok((p, ConditionalState::Degenerate));
    }
    let state = DensityMatrix::new(unnorm.scale_re(1.0 / p))?;
    Ok((p, ConditionalState::State(state)))
}

/// A measurement branch: either a valid renormalized state or a degenerate
/// flag for outcomes of vanishing probability.
#[derive(Debug, Clone)]
pub enum ConditionalState {
    State(DensityMatrix),
    Degenerate,
}

impl ConditionalState {
    pub fn state(&self) -> Option<&DensityMatrix> {
        match self {
            ConditionalState::State(rho) => Some(rho),
            ConditionalState::Degenerate => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, ConditionalState::Degenerate)
    }
}

/// A d×d complex positive unit-trace matrix: the state of the work medium.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate Hermiticity, unit trace and positivity within [`tol::DENSITY`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermiticity_deviation();
        if dev > tol::DENSITY {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian: max |ρ - ρ†| = {dev:.3e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::DENSITY || tr.im.abs() > tol::DENSITY {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let eig = hermitian_eig(&matrix.add(&matrix.adjoint()).scale_re(0.5))?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -tol::DENSITY {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Pure state |ψ⟩⟨ψ| from a (normalized) ket.
    pub fn from_pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::DENSITY {
            return Err(Error::InvalidDensity(format!(
                "ket norm {norm} is not 1"
            )));
        }
        Self::new(ComplexMatrix::outer(ket, ket))
    }

    /// 𝟙/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Qubit state from the excited population ρ₂₂ and coherence ρ₁₂.
    pub fn qubit(rho22: f64, rho12: C64) -> Result<Self> {
        let rho11 = 1.0 - rho22;
        let m = ComplexMatrix::from_entries(
            2,
            vec![C64::new(rho11, 0.0), rho12, rho12.conj(), C64::new(rho22, 0.0)],
        )?;
        Self::new(m)
    }

    /// Qubit state with population imbalance δρ = ρ₂₂ − ρ₁₁ and maximal
    /// coherence ρ₁₂ = √(ρ₁₁ρ₂₂); this is the pure state with that imbalance.
    pub fn qubit_max_coherent(delta_rho: f64) -> Result<Self> {
        let rho22 = (1.0 + delta_rho) / 2.0;
        let rho11 = 1.0 - rho22;
        Self::qubit(rho22, C64::new((rho11 * rho22).max(0.0).sqrt(), 0.0))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Population imbalance ρ₂₂ − ρ₁₁ of a qubit state.
    pub fn delta_rho(&self) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::NotQubit { dim: self.dim() });
        }
        Ok(self.matrix.get(1, 1).re - self.matrix.get(0, 0).re)
    }

    /// Purity Tr ρ².
    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).trace().re
    }
}

/// Serialize as the flat row-major entry list (re, im pairs).
impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for c in &self.entries {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}
