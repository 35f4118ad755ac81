//! Kraus-operator CPTP channels and the channel zoo.
//!
//! A channel is an ordered list of Kraus operators. The order is part of the
//! channel's identity: the switch cross-map depends on the chosen Kraus
//! decomposition, not just on the map it implements, so each zoo constructor
//! freezes one canonical decomposition.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, DensityMatrix, ONE, ZERO};
use crate::tol;

/// A CPTP map as an ordered Kraus list.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    /// Wrap a Kraus list. Shape is enforced here; completeness is checked by
    /// [`validate_cptp`] so that deliberately broken lists can be inspected.
    pub fn new(dim: usize, kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidMatrix("empty Kraus list".into()));
        }
        for k in &kraus {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: k.dim(),
                });
            }
        }
        Ok(Self {
            dim,
            kraus,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The identity map {𝟙}.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
            label: "identity".into(),
        }
    }

    /// A unitary channel {U}.
    pub fn unitary(u: ComplexMatrix, label: impl Into<String>) -> Self {
        Self {
            dim: u.dim(),
            kraus: vec![u],
            label: label.into(),
        }
    }
}

/// Outcome of a CPTP completeness check.
#[derive(Debug, Clone)]
pub struct CptpReport {
    /// Completeness holds within [`tol::COMPLETENESS`].
    pub ok: bool,
    /// Frobenius norm ‖Σ K†K − 𝟙‖.
    pub deficit_norm: f64,
}

/// Check Σ_i K_i†K_i = 𝟙. Violations come back as a report, not an error.
pub fn validate_cptp(channel: &KrausChannel) -> CptpReport {
    let mut sum = ComplexMatrix::zeros(channel.dim());
    for k in channel.kraus() {
        sum = sum.add(&k.adjoint().mul(k));
    }
    let deficit_norm = sum
        .sub(&ComplexMatrix::identity(channel.dim()))
        .frobenius_norm();
    CptpReport {
        ok: deficit_norm <= tol::COMPLETENESS,
        deficit_norm,
    }
}

/// Apply the channel: Σ_i K_i ρ K_i†.
pub fn apply(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if channel.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: channel.dim(),
            right: rho.dim(),
        });
    }
    DensityMatrix::new(apply_raw(channel, rho.matrix()))
}

/// Kraus sum on a raw matrix, without density-matrix validation. Used where
/// the input is a general operator (map-equality probes, cross terms).
pub fn apply_raw(channel: &KrausChannel, m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(channel.dim());
    for k in channel.kraus() {
        out = out.add(&k.mul(m).mul(&k.adjoint()));
    }
    out
}

/// Composition outer ∘ inner: Kraus list {O_i I_j} in row-major (i outer,
/// j inner) order, so applying it equals applying `inner` first.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            left: outer.dim(),
            right: inner.dim(),
        });
    }
    let mut kraus = Vec::with_capacity(outer.kraus().len() * inner.kraus().len());
    for o in outer.kraus() {
        for i in inner.kraus() {
            kraus.push(o.mul(i));
        }
    }
    KrausChannel::new(
        outer.dim(),
        kraus,
        format!("{} ∘ {}", outer.label(), inner.label()),
    )
}

/// Exact map equality test on the matrix-unit operator basis: true iff
/// (A∘B)\[E\] = (B∘A)\[E\] within `tolerance` for every basis element E. Probing
/// the full basis avoids any sampling error.
pub fn maps_commute(a: &KrausChannel, b: &KrausChannel, tolerance: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let ab = compose(a, b)?;
    let ba = compose(b, a)?;
    let d = a.dim();
    for r in 0..d {
        for c in 0..d {
            let mut unit = ComplexMatrix::zeros(d);
            unit.set(r, c, ONE);
            let left = apply_raw(&ab, &unit);
            let right = apply_raw(&ba, &unit);
            if left.max_abs_diff(&right) > tolerance {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The Weyl (clock-and-shift) orthogonal unitary basis U_{a,b} = X^a Z^b in
/// row-major (a, b) order, a, b = 0..d−1, with X|k⟩ = |k+1 mod d⟩ and
/// Z|k⟩ = ω^k|k⟩, ω = e^{2πi/d}.
pub fn weyl_basis(dim: usize) -> Vec<ComplexMatrix> {
    let omega = 2.0 * std::f64::consts::PI / dim as f64;
    let mut basis = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            let mut u = ComplexMatrix::zeros(dim);
            for k in 0..dim {
                // X^a Z^b |k⟩ = ω^{bk} |k+a⟩
                let phase = C64::new(0.0, omega * (b * k) as f64).exp();
                u.set((k + a) % dim, k, phase);
            }
            basis.push(u);
        }
    }
    basis
}

/// Completely depolarizing map: Kraus {U_i/d} over the Weyl basis, sending
/// every state to 𝟙/d.
pub fn depolarizing(dim: usize) -> Result<KrausChannel> {
    if dim < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: dim as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    let kraus = weyl_basis(dim)
        .into_iter()
        .map(|u| u.scale_re(1.0 / dim as f64))
        .collect();
    KrausChannel::new(dim, kraus, format!("depolarizing(d={dim})"))
}

/// A d×d Hermitian energy reference with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    dim: usize,
    energies: Vec<f64>,
    /// Orthonormal eigenvector columns aligned with `energies`.
    eigenvectors: Vec<Vec<C64>>,
}

impl Hamiltonian {
    /// Diagonal Hamiltonian with the computational basis as eigenbasis.
    /// Energies must already be ascending.
    pub fn from_energies(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidHamiltonian("no energy levels".into()));
        }
        if energies.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidHamiltonian(
                "energies must be sorted ascending".into(),
            ));
        }
        let dim = energies.len();
        let eigenvectors = (0..dim)
            .map(|k| {
                let mut v = vec![ZERO; dim];
                v[k] = ONE;
                v
            })
            .collect();
        Ok(Self {
            dim,
            energies,
            eigenvectors,
        })
    }

    /// Qubit convention ε₁ = 0, ε₂ = 1.
    pub fn qubit() -> Self {
        Self::from_energies(vec![0.0, 1.0]).expect("static levels are sorted")
    }

    /// Diagonalize a Hermitian matrix and store its spectrum ascending.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        let dec = hermitian_eig(m).map_err(|e| match e {
            Error::NonHermitian { deviation } => Error::InvalidHamiltonian(format!(
                "not Hermitian: max |H - H†| = {deviation:.3e}"
            )),
            other => other,
        })?;
        // hermitian_eig sorts descending; flip to ascending energies.
        let energies: Vec<f64> = dec.eigenvalues.iter().rev().copied().collect();
        let eigenvectors: Vec<Vec<C64>> = dec.eigenvectors.iter().rev().cloned().collect();
        Ok(Self {
            dim: m.dim(),
            energies,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Energies, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eigenvectors(&self) -> &[Vec<C64>] {
        &self.eigenvectors
    }

    /// H = Σ_k ε_k |ε_k⟩⟨ε_k| as a matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for (e, v) in self.energies.iter().zip(&self.eigenvectors) {
            m = m.add(&ComplexMatrix::outer(v, v).scale_re(*e));
        }
        m
    }

    /// Populations ⟨ε_k|ρ|ε_k⟩ of a state in this eigenbasis.
    pub fn populations(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.eigenvectors
            .iter()
            .map(|v| rho.expectation(v).re)
            .collect()
    }

    /// Zero out coherences between this Hamiltonian's eigenvectors:
    /// Σ_k |ε_k⟩⟨ε_k| ρ |ε_k⟩⟨ε_k|.
    pub fn dephase(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for (v, p) in self.eigenvectors.iter().zip(self.populations(rho)) {
            m = m.add(&ComplexMatrix::outer(v, v).scale_re(p));
        }
        m
    }

    /// True when all levels coincide within [`tol::ENERGY_DEGENERATE`]; no
    /// cyclic process can then lower the internal energy.
    pub fn is_fully_degenerate(&self) -> bool {
        self.energies[self.dim - 1] - self.energies[0] <= tol::ENERGY_DEGENERATE
    }
}

/// Gibbs state e^{−βH}/Z.
pub fn gibbs(h: &Hamiltonian, beta: f64) -> DensityMatrix {
    let weights: Vec<f64> = h.energies().iter().map(|e| (-beta * e).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(h.dim());
    for (w, v) in weights.iter().zip(h.eigenvectors()) {
        m = m.add(&ComplexMatrix::outer(v, v).scale_re(w / z));
    }
    DensityMatrix::new(m).expect("Gibbs state is a valid density matrix")
}

/// Thermalizing map: Kraus {Â U_i/√d} with Â the principal square root of the
/// Gibbs state and {U_i} the Weyl basis. Sends every state to e^{−βH}/Z.
pub fn thermalizing(h: &Hamiltonian, beta: f64) -> Result<KrausChannel> {
    if beta.is_nan() || beta < 0.0 || !beta.is_finite() {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let d = h.dim();
    let tau = gibbs(h, beta);
    // Principal (positive) square root via the spectral decomposition.
    let dec = hermitian_eig(tau.matrix())?;
    let mut root = ComplexMatrix::zeros(d);
    for (r, v) in dec.eigenvalues.iter().zip(&dec.eigenvectors) {
        root = root.add(&ComplexMatrix::outer(v, v).scale_re(r.max(0.0).sqrt()));
    }
    let scale = 1.0 / (d as f64).sqrt();
    let kraus = weyl_basis(d)
        .into_iter()
        .map(|u| root.mul(&u).scale_re(scale))
        .collect();
    KrausChannel::new(d, kraus, format!("thermalizing(β={beta})"))
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// Generalized amplitude damping on a qubit.
///
/// `p` balances damping (Â₀, Â₁) against pumping (Â₂, Â₃); `gamma` is the
/// channel strength. `gamma = 0` reduces to the identity map.
pub fn gad(p: f64, gamma: f64) -> Result<KrausChannel> {
    check_unit_interval("p", p)?;
    check_unit_interval("gamma", gamma)?;
    let sp = p.sqrt();
    let sq = (1.0 - p).sqrt();
    let sg = gamma.sqrt();
    let sg1 = (1.0 - gamma).sqrt();
    let re = |x: f64| C64::new(x, 0.0);
    let kraus = vec![
        ComplexMatrix::from_entries(2, vec![re(sp), ZERO, ZERO, re(sp * sg1)])?,
        ComplexMatrix::from_entries(2, vec![ZERO, re(sp * sg), ZERO, ZERO])?,
        ComplexMatrix::from_entries(2, vec![re(sq * sg1), ZERO, ZERO, re(sq)])?,
        ComplexMatrix::from_entries(2, vec![ZERO, ZERO, re(sq * sg), ZERO])?,
    ];
    KrausChannel::new(2, kraus, format!("gad(p={p},γ={gamma})"))
}

/// Phase flip on a qubit: {√q 𝟙, √(1−q) σ_z}. `q = 1` reduces to the identity.
pub fn phase_flip(q: f64) -> Result<KrausChannel> {
    check_unit_interval("q", q)?;
    let kraus = vec![
        ComplexMatrix::identity(2).scale_re(q.sqrt()),
        ComplexMatrix::from_diagonal(&[1.0, -1.0]).scale_re((1.0 - q).sqrt()),
    ];
    KrausChannel::new(2, kraus, format!("phase_flip(q={q})"))
}
