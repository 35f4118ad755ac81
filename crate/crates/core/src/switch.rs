//! The quantum-switch supermap and its derived objects.
//!
//! Two CPTP maps A and B are applied in an order entangled with a control
//! qubit. The joint output carries the two fixed orders on the diagonal
//! control blocks and the cross-map χ\[ρ\] = Σ_ij Â_i B̂_j ρ Â_i† B̂_j† on the
//! off-diagonal block. Measuring the control in a tilted basis produces the
//! conditional states that feed daemonic work extraction.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_raw, compose, KrausChannel};
use crate::error::{Error, Result};
use crate::matcore::{
    partial_trace_q, project_q, ComplexMatrix, ConditionalState, DensityMatrix,
};

/// Pure control-qubit preparation |φ,α⟩ = √φ|0⟩ + e^{iα}√(1−φ)|1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSpec {
    /// Population weight φ ∈ \[0, 1\].
    pub phi: f64,
    /// Relative phase α ∈ [0, 2π).
    pub alpha: f64,
}

impl ControlSpec {
    pub fn new(phi: f64, alpha: f64) -> Result<Self> {
        check_phi_alpha("phi", phi, "alpha", alpha)?;
        Ok(Self { phi, alpha })
    }

    /// The balanced preparation (½, 0).
    pub fn balanced() -> Self {
        Self {
            phi: 0.5,
            alpha: 0.0,
        }
    }

    pub fn ket(&self) -> [C64; 2] {
        tilted_ket(self.phi, self.alpha)
    }
}

/// Projective measurement basis of the control qubit,
/// |φ′,α′⟩₊ = √φ′|0⟩ + e^{iα′}√(1−φ′)|1⟩ and
/// |φ′,α′⟩₋ = −e^{−iα′}√(1−φ′)|0⟩ + √φ′|1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    /// Basis weight φ′ ∈ \[0, 1\].
    pub phi_m: f64,
    /// Basis phase α′ ∈ [0, 2π).
    pub alpha_m: f64,
}

impl MeasureSpec {
    pub fn new(phi_m: f64, alpha_m: f64) -> Result<Self> {
        check_phi_alpha("phi_m", phi_m, "alpha_m", alpha_m)?;
        Ok(Self { phi_m, alpha_m })
    }

    /// The balanced basis (½, 0), i.e. {|+⟩, |−⟩}.
    pub fn balanced() -> Self {
        Self {
            phi_m: 0.5,
            alpha_m: 0.0,
        }
    }

    pub fn ket_plus(&self) -> [C64; 2] {
        tilted_ket(self.phi_m, self.alpha_m)
    }

    pub fn ket_minus(&self) -> [C64; 2] {
        let c = (1.0 - self.phi_m).max(0.0).sqrt();
        [
            -C64::new(0.0, -self.alpha_m).exp() * c,
            C64::new(self.phi_m.max(0.0).sqrt(), 0.0),
        ]
    }
}

fn tilted_ket(phi: f64, alpha: f64) -> [C64; 2] {
    [
        C64::new(phi.max(0.0).sqrt(), 0.0),
        C64::new(0.0, alpha).exp() * (1.0 - phi).max(0.0).sqrt(),
    ]
}

fn check_phi_alpha(
    phi_name: &'static str,
    phi: f64,
    alpha_name: &'static str,
    alpha: f64,
) -> Result<()> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::OutOfRange {
            name: phi_name,
            value: phi,
            min: 0.0,
            max: 1.0,
        });
    }
    if !(0.0..std::f64::consts::TAU).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: alpha_name,
            value: alpha,
            min: 0.0,
            max: std::f64::consts::TAU,
        });
    }
    Ok(())
}

/// Conditional post-measurement states with their outcome probabilities.
#[derive(Debug, Clone)]
pub struct ConditionalPair {
    pub p_plus: f64,
    pub p_minus: f64,
    pub rho_plus: ConditionalState,
    pub rho_minus: ConditionalState,
}

fn ensure_equal_dims(a: &KrausChannel, b: &KrausChannel) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Kraus decomposition of the switch supermap:
/// K_ij = Â_i B̂_j ⊗ |0⟩⟨0| + B̂_j Â_i ⊗ |1⟩⟨1|, row-major in (i, j).
pub fn switch_kraus(a: &KrausChannel, b: &KrausChannel) -> Result<Vec<ComplexMatrix>> {
    ensure_equal_dims(a, b)?;
    let d = a.dim();
    let mut out = Vec::with_capacity(a.kraus().len() * b.kraus().len());
    for ai in a.kraus() {
        for bj in b.kraus() {
            let ab = ai.mul(bj);
            let ba = bj.mul(ai);
            let mut k = ComplexMatrix::zeros(2 * d);
            for m in 0..d {
                for n in 0..d {
                    k.set(2 * m, 2 * n, ab.get(m, n));
                    k.set(2 * m + 1, 2 * n + 1, ba.get(m, n));
                }
            }
            out.push(k);
        }
    }
    Ok(out)
}

/// Cross-map χ\[ρ\] = Σ_ij Â_i B̂_j ρ Â_i† B̂_j†, computed by the direct double
/// sum over Kraus pairs.
///
/// χ need not be a density matrix: it is generally neither trace-one nor
/// positive, and it depends on the Kraus decompositions, not just the maps.
pub fn cross_map(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
) -> Result<ComplexMatrix> {
    ensure_equal_dims(a, b)?;
    if a.dim() != rho_in.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: rho_in.dim(),
        });
    }
    let mut chi = ComplexMatrix::zeros(a.dim());
    for ai in a.kraus() {
        let ai_dag = ai.adjoint();
        for bj in b.kraus() {
            let term = ai
                .mul(bj)
                .mul(rho_in.matrix())
                .mul(&ai_dag)
                .mul(&bj.adjoint());
            chi = chi.add(&term);
        }
    }
    Ok(chi)
}

/// Joint system⊗control output of the switch for a pure control preparation.
///
/// Built block-wise: (0,0) block φ(A∘B)\[ρ\], (1,1) block (1−φ)(B∘A)\[ρ\],
/// (0,1) block e^{−iα}√(φ(1−φ)) χ\[ρ\] plus its Hermitian conjugate. Equality
/// with the Kraus-sum form Σ K_ij (ρ ⊗ |φ,α⟩⟨φ,α|) K_ij† is covered by tests.
pub fn switch_apply(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
) -> Result<ComplexMatrix> {
    ensure_equal_dims(a, b)?;
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let chi = cross_map(a, b, rho_in)?;
    Ok(assemble_joint(&ab, &ba, &chi, control))
}

/// Joint state from precomputed (A∘B)\[ρ\], (B∘A)\[ρ\] and χ\[ρ\].
pub fn assemble_joint(
    ab: &ComplexMatrix,
    ba: &ComplexMatrix,
    chi: &ComplexMatrix,
    control: &ControlSpec,
) -> ComplexMatrix {
    let d = ab.dim();
    let phi = control.phi;
    let off = chi.scale(C64::new(0.0, -control.alpha).exp() * (phi * (1.0 - phi)).max(0.0).sqrt());
    let mut joint = ComplexMatrix::zeros(2 * d);
    for m in 0..d {
        for n in 0..d {
            joint.set(2 * m, 2 * n, ab.get(m, n) * phi);
            joint.set(2 * m + 1, 2 * n + 1, ba.get(m, n) * (1.0 - phi));
            joint.set(2 * m, 2 * n + 1, off.get(m, n));
            joint.set(2 * m + 1, 2 * n, off.get(n, m).conj());
        }
    }
    joint
}

/// Joint output for an incoherent (diagonal) control state diag(φ, 1−φ):
/// the separable mixture φ(A∘B)\[ρ\]⊗|0⟩⟨0| + (1−φ)(B∘A)\[ρ\]⊗|1⟩⟨1|.
pub fn switch_apply_incoherent(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    phi: f64,
) -> Result<ComplexMatrix> {
    ensure_equal_dims(a, b)?;
    let d = a.dim();
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let mut joint = ComplexMatrix::zeros(2 * d);
    for m in 0..d {
        for n in 0..d {
            joint.set(2 * m, 2 * n, ab.get(m, n) * phi);
            joint.set(2 * m + 1, 2 * n + 1, ba.get(m, n) * (1.0 - phi));
        }
    }
    Ok(joint)
}

/// Apply the switch supermap through its Kraus list for an arbitrary control
/// density matrix. Slower than [`switch_apply`]; used as its cross-check.
pub fn switch_apply_kraus(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    rho_q: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let kraus = switch_kraus(a, b)?;
    let joint_in = crate::matcore::tensor_with_qubit(rho_in.matrix(), rho_q);
    let mut out = ComplexMatrix::zeros(joint_in.dim());
    for k in &kraus {
        out = out.add(&k.mul(&joint_in).mul(&k.adjoint()));
    }
    Ok(out)
}

/// Classically controlled output φ(A∘B)\[ρ\] + (1−φ)(B∘A)\[ρ\]: the state left
/// after discarding the control qubit.
pub fn classical_output(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    phi: f64,
) -> Result<DensityMatrix> {
    ensure_equal_dims(a, b)?;
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    DensityMatrix::new(ab.scale_re(phi).add(&ba.scale_re(1.0 - phi)))
}

/// Conditional states from projecting the control qubit onto the
/// `measure` basis, with their probabilities.
///
/// Single code path: both branches go through [`project_q`] on the joint
/// output state; the algebraic forms serve as test oracles.
pub fn conditional_states(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
) -> Result<ConditionalPair> {
    let joint = switch_apply(a, b, rho_in, control)?;
    conditional_states_of_joint(&joint, measure)
}

/// Conditional states for a prebuilt joint state.
pub fn conditional_states_of_joint(
    joint: &ComplexMatrix,
    measure: &MeasureSpec,
) -> Result<ConditionalPair> {
    let (p_plus, rho_plus) = project_q(joint, &measure.ket_plus())?;
    let (p_minus, rho_minus) = project_q(joint, &measure.ket_minus())?;
    Ok(ConditionalPair {
        p_plus,
        p_minus,
        rho_plus,
        rho_minus,
    })
}

/// The gain operator Ĝ satisfying p_± ρ_± = ρ_class/2 ± Ĝ for the
/// un-normalized conditional states (classical output taken at the control
/// weight φ):
///
/// Ĝ = (φ′ − ½)[(φ − ½){A,B}\[ρ\] + ½\[A,B\]\[ρ\]]
///     + √(φφ′(1−φ)(1−φ′)) (e^{−i(α−α′)} χ\[ρ\] + h.c.),
///
/// with {A,B}\[ρ\] and \[A,B\]\[ρ\] the anticommutator and commutator of the
/// composed maps.
pub fn gain_operator(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
) -> Result<ComplexMatrix> {
    ensure_equal_dims(a, b)?;
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let chi = cross_map(a, b, rho_in)?;
    Ok(gain_operator_from_parts(&ab, &ba, &chi, control, measure))
}

/// Gain operator assembled from precomputed (A∘B)\[ρ\], (B∘A)\[ρ\] and χ\[ρ\];
/// lets measurement sweeps reuse the channel applications.
pub fn gain_operator_from_parts(
    ab: &ComplexMatrix,
    ba: &ComplexMatrix,
    chi: &ComplexMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
) -> ComplexMatrix {
    let phi = control.phi;
    let phi_m = measure.phi_m;
    let anti = ab.add(ba);
    let comm = ab.sub(ba);
    let order_part = anti
        .scale_re(phi - 0.5)
        .add(&comm.scale_re(0.5))
        .scale_re(phi_m - 0.5);
    let weight = (phi * phi_m * (1.0 - phi) * (1.0 - phi_m)).max(0.0).sqrt();
    let rotated = chi.scale(C64::new(0.0, -(control.alpha - measure.alpha_m)).exp());
    order_part.add(&rotated.plus_adjoint().scale_re(weight))
}

/// Sign selector for the non-commutative cross-map contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcSign {
    /// Commutator form χⁿᶜ₋, paired with χ = +(A∘B)\[ρ\] + χⁿᶜ₋\[ρ\].
    Minus,
    /// Anticommutator form χⁿᶜ₊, paired with χ = −(A∘B)\[ρ\] + χⁿᶜ₊\[ρ\].
    Plus,
}

/// Non-commutative part of the cross-map,
/// χⁿᶜ∓\[ρ\] = Σ_ij Â_i B̂_j ρ \[B̂_j, Â_i\]∓†,
/// where \[·,·\]₋ is the commutator and \[·,·\]₊ the anticommutator.
///
/// It vanishes when all Kraus pairs commute (respectively anticommute), in
/// which case every control measurement returns the consecutive-order output.
/// The decomposition χ\[ρ\] = ±(A∘B)\[ρ\] + χⁿᶜ∓\[ρ\] holds exactly (see tests).
pub fn chi_nc(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    sign: NcSign,
) -> Result<ComplexMatrix> {
    ensure_equal_dims(a, b)?;
    let mut out = ComplexMatrix::zeros(a.dim());
    for ai in a.kraus() {
        for bj in b.kraus() {
            let ba = bj.mul(ai);
            let ab = ai.mul(bj);
            let bracket = match sign {
                NcSign::Minus => ba.sub(&ab),
                NcSign::Plus => ba.add(&ab),
            };
            out = out.add(&ab.mul(rho_in.matrix()).mul(&bracket.adjoint()));
        }
    }
    Ok(out)
}

/// Probabilities from the algebraic form,
/// p± = ½ ± ½[(2φ−1)(2φ′−1) + 2√(φφ′(1−φ)(1−φ′)) Tr(e^{−i(α−α′)}χ\[ρ\] + h.c.)].
/// Test oracle for the projective path in [`conditional_states`].
pub fn branch_probabilities_from_chi(
    chi: &ComplexMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
) -> (f64, f64) {
    let phi = control.phi;
    let phi_m = measure.phi_m;
    let weight = (phi * phi_m * (1.0 - phi) * (1.0 - phi_m)).max(0.0).sqrt();
    let rotated = chi.scale(C64::new(0.0, -(control.alpha - measure.alpha_m)).exp());
    let tr = rotated.plus_adjoint().trace().re;
    let bias = 0.5 * ((2.0 * phi - 1.0) * (2.0 * phi_m - 1.0) + 2.0 * weight * tr);
    (0.5 + bias, 0.5 - bias)
}

/// Residual of the partial-trace identity Tr_Q(switch output) = classical
/// output. Exposed for the verification suites.
pub fn partial_trace_residual(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
) -> Result<f64> {
    let joint = switch_apply(a, b, rho_in, control)?;
    let traced = partial_trace_q(&joint)?;
    let class = classical_output(a, b, rho_in, control.phi)?;
    Ok(traced.sub(class.matrix()).frobenius_norm())
}
